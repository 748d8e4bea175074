"""Command-line pipeline: fit, characterize, mitigate, simulate-f.

Exit codes: 0 success (including a successful-correction verdict),
1 usage or input-parsing problem, 2 numerical failure (singular noise
matrix, rank-deficient probes, no convergence, infeasible sweep point),
3 correction completed but judged not successful (the report is still
written).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, distances, io, mitigation, noise, simulate, tomography
from .errors import (
    InvalidPovmError,
    NotProjectiveIdealError,
    QReadoutError,
    RankDeficientError,
    SingularMatrixError,
    TooManyOutcomesError,
)
from .povm import diagonal_projective, readout_params, tensor_povm

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_NOT_SUCCESSFUL = 3

_NUMERICAL_ERRORS = (
    SingularMatrixError,
    RankDeficientError,
    NotProjectiveIdealError,
    InvalidPovmError,
    TooManyOutcomesError,
)


class _Parser(argparse.ArgumentParser):
    """argparse reserves exit code 2 for usage errors; this CLI uses 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="qreadout", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qreadout {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_fit = sub.add_parser("fit",
                           help="reconstruct a detector POVM from calibration counts")
    p_fit.add_argument("calibration", help="calibration JSON (or fixture:<name>)")
    p_fit.add_argument("--out", required=True, help="output POVM JSON path")
    p_fit.add_argument("--report", help="optional diagnostics JSON path")
    p_fit.add_argument("--probe-set", choices=["auto", "minimal", "overcomplete"],
                       default="auto",
                       help="restrict records to a probe set (default: use all)")
    p_fit.add_argument("--tol", type=float, default=tomography.MLE_DEFAULT_TOL,
                       help="fixed-point step tolerance")
    p_fit.add_argument("--max-iter", type=int, default=tomography.MLE_DEFAULT_MAX_ITER,
                       help="iteration cap")
    p_fit.set_defaults(func=cmd_fit)

    p_char = sub.add_parser("characterize",
                            help="noise decomposition, correction matrix and "
                                 "distance bounds of a detector")
    p_char.add_argument("povm", nargs="+",
                        help="POVM JSON (or fixture:<name>); several files are "
                             "tensored, first file = most significant qubit(s)")
    p_char.add_argument("--out", required=True, help="output report JSON path")
    p_char.add_argument("--subsets", type=int, default=distances.DEFAULT_SUBSET_SAMPLES,
                        help="sample size for the lower bound on large detectors")
    p_char.add_argument("--seed", type=int, default=0, help="subset-sampling seed")
    p_char.set_defaults(func=cmd_characterize)

    p_mit = sub.add_parser("mitigate",
                           help="correct measured counts using a characterization report")
    p_mit.add_argument("counts", help="counts JSON")
    p_mit.add_argument("characterization", help="report written by 'characterize'")
    p_mit.add_argument("--out", required=True, help="output report JSON path")
    p_mit.add_argument("--pr-err", type=float, default=0.01,
                       help="accepted probability of the statistical bound failing")
    p_mit.set_defaults(func=cmd_mitigate)

    p_sim = sub.add_parser("simulate-f",
                           help="Monte Carlo fraction of successful corrections")
    p_sim.add_argument("povm", help="POVM JSON (or fixture:<name>)")
    p_sim.add_argument("--out", required=True, help="output report JSON path")
    p_sim.add_argument("--csv", help="figure data CSV path")
    p_sim.add_argument("--trials", type=int, default=10000, help="Monte Carlo trials")
    p_sim.add_argument("--shots", type=int, default=simulate.DEFAULT_SHOTS,
                       help="shots per trial (0 = exact probabilities)")
    p_sim.add_argument("--pr-err", type=float, default=simulate.DEFAULT_PR_ERR)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--z-sweep", type=int, default=0, metavar="POINTS",
                       help="sweep the coherent magnitude over this many grid "
                            "points (single-qubit detectors only)")
    p_sim.set_defaults(func=cmd_simulate_f)
    return parser


def cmd_fit(args) -> int:
    path = io.resolve_input_path(args.calibration)
    records, num_qubits = io.load_calibration(path)
    if args.probe_set != "auto":
        wanted = set(tomography.probe_labels(num_qubits, args.probe_set))
        records = [r for r in records if r.label in wanted]
        missing = wanted - {r.label for r in records}
        if missing:
            raise ValueError(
                f"calibration lacks records for probe set {args.probe_set!r}: "
                f"{sorted(missing)}"
            )
    probes, freqs = tomography.calibration_matrices(records)
    effects, diagnostics = tomography.mle_fit(
        probes, freqs, tol=args.tol, max_iter=args.max_iter
    )
    io.save_povm(args.out, effects)
    summary = {
        "iterations": diagnostics.iterations,
        "final_change": diagnostics.final_change,
        "log_likelihood": diagnostics.log_likelihood,
        "converged": diagnostics.converged,
        "records_used": len(records),
    }
    if args.report:
        io.save_report(
            args.report, "fit", summary,
            prov=io.provenance(inputs={"calibration": path}),
        )
    print(
        f"fit: {len(records)} records -> {args.out} "
        f"({diagnostics.iterations} iterations, converged={diagnostics.converged})"
    )
    if not diagnostics.converged:
        print("fit: iteration cap reached before tolerance", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _characterize_payload(effects, factor_stacks, subsets, seed):
    n, d = effects.shape[0], effects.shape[1]
    if n != d:
        raise NotProjectiveIdealError(
            f"characterization needs a projective-shaped detector (n = d), "
            f"got {n} effects in dim {d}"
        )
    decomposition = noise.classical_part(effects, num_subsets=subsets, seed=seed)
    correction = noise.correction_matrix(decomposition.stochastic)

    factor_coherent = None
    factor_dop = None
    factor_info = None
    if len(factor_stacks) > 1:
        factor_info = []
        factor_coherent = []
        factor_dop = []
        for stack in factor_stacks:
            dec = noise.classical_part(stack)
            ideal = diagonal_projective(stack.shape[1])
            dop = distances.operational_distance_exact(stack, ideal)
            factor_coherent.append(dec.coherent_distance)
            factor_dop.append(dop)
            entry = {
                "coherent_distance": dec.coherent_distance,
                "distance_to_ideal": dop,
            }
            if stack.shape == (2, 2, 2):
                params = readout_params(stack)
                entry.update(p=params.p, q=params.q, z_mag=params.z_mag)
            factor_info.append(entry)

    if decomposition.coherent_method == distances.METHOD_EXACT:
        coherent = distances.DistanceBound(
            decomposition.coherent_distance, decomposition.coherent_distance,
            distances.METHOD_EXACT,
        )
    else:
        upper = (
            distances.subadditive_upper(factor_coherent)
            if factor_coherent is not None else 1.0
        )
        method = (
            distances.METHOD_COMBINED if factor_coherent is not None
            else distances.METHOD_SAMPLED_LOWER
        )
        coherent = distances.DistanceBound(
            decomposition.coherent_distance,
            max(decomposition.coherent_distance, upper), method,
        )

    ideal = diagonal_projective(d)
    reference = distances.operational_distance_bound(
        effects, ideal, factor_distances=factor_dop, num_subsets=subsets, seed=seed
    )

    payload = {
        "num_outcomes": n,
        "dim": d,
        "stochastic": decomposition.stochastic,
        "correction": correction.matrix,
        "norm_1to1": correction.norm_1to1,
        "condition": correction.condition,
        "column_residual": decomposition.column_residual,
        "distance_to_ideal": io.bound_to_dict(reference),
        "coherent_distance": io.bound_to_dict(coherent),
        "delta_no_statistics": correction.norm_1to1 * coherent.upper,
    }
    if effects.shape == (2, 2, 2):
        params = readout_params(effects)
        payload["readout_params"] = {
            "p": params.p, "q": params.q, "z_mag": params.z_mag,
            "n0": params.n0, "nz": params.nz,
        }
    if factor_info is not None:
        payload["factors"] = factor_info
    return payload


def cmd_characterize(args) -> int:
    paths = [io.resolve_input_path(p) for p in args.povm]
    stacks = [io.load_povm(p) for p in paths]
    effects = tensor_povm(*stacks) if len(stacks) > 1 else stacks[0]
    payload = _characterize_payload(effects, stacks, args.subsets, args.seed)
    prov = io.provenance(
        inputs={f"povm{i}": p for i, p in enumerate(paths)}, seed=args.seed,
        subsets=args.subsets,
    )
    io.save_report(args.out, "characterization", payload, prov=prov)
    bound = payload["distance_to_ideal"]
    print(
        f"characterize: D(measured, ideal) in [{bound['lower']:.6g}, "
        f"{bound['upper']:.6g}] ({bound['method']}), "
        f"coherent {payload['coherent_distance']['lower']:.6g}.."
        f"{payload['coherent_distance']['upper']:.6g}, "
        f"norm {payload['norm_1to1']:.6g} -> {args.out}"
    )
    return EXIT_OK


def cmd_mitigate(args) -> int:
    counts_path = io.resolve_input_path(args.counts)
    char_path = io.resolve_input_path(args.characterization)
    counts, _num_qubits = io.load_counts(counts_path)
    char = io.load_report(char_path)
    if char.get("kind") != "characterization":
        raise ValueError(f"{char_path} is not a characterization report")
    matrix = np.asarray(char["correction"], dtype=np.float64)
    if matrix.shape != (counts.size, counts.size):
        raise ValueError(
            f"characterization is for {matrix.shape[0]} outcomes, "
            f"counts file has {counts.size}"
        )
    correction = noise.Correction(
        source=np.asarray(char["stochastic"], dtype=np.float64),
        matrix=matrix,
        norm_1to1=float(char["norm_1to1"]),
        condition=float(char["condition"]),
    )
    reference = distances.DistanceBound(**char["distance_to_ideal"])
    shots = int(counts.sum())
    report = mitigation.mitigate(
        counts / shots,
        correction,
        coherent_distance=float(char["coherent_distance"]["upper"]),
        reference=reference,
        shots=shots,
        pr_err=args.pr_err,
    )
    payload = io.mitigation_report_to_dict(report)
    prov = io.provenance(
        inputs={"counts": counts_path, "characterization": char_path}
    )
    io.save_report(args.out, "mitigation", payload, prov=prov)
    verdict = "successful" if report.successful else "not successful"
    print(
        f"mitigate: delta+alpha={report.budget.total:.6g} vs "
        f"rhs={report.rhs_bound:.6g} -> {verdict} ({args.out})"
    )
    return EXIT_OK if report.successful else EXIT_NOT_SUCCESSFUL


def cmd_simulate_f(args) -> int:
    path = io.resolve_input_path(args.povm)
    effects = io.load_povm(path)
    n, d = effects.shape[0], effects.shape[1]
    if n != d:
        raise NotProjectiveIdealError(
            f"simulate-f needs a projective-shaped detector, got {n} effects in dim {d}"
        )
    shots = None if args.shots == 0 else args.shots
    ideal = diagonal_projective(d)

    if args.z_sweep:
        if effects.shape != (2, 2, 2):
            raise ValueError("--z-sweep only applies to single-qubit detectors")
        params = readout_params(effects)
        z_max = simulate.max_coherent_magnitude(params.p, params.q)
        grid = np.linspace(0.0, 0.995 * z_max, args.z_sweep)
        reports = simulate.coherent_sweep(
            params.p, params.q, grid, trials=args.trials, shots=shots,
            pr_err=args.pr_err, seed=args.seed,
        )
    else:
        reports = [
            simulate.fraction_f(effects, ideal, trials=args.trials, shots=shots,
                                pr_err=args.pr_err, seed=args.seed)
        ]

    payload = {
        "sweep": bool(args.z_sweep),
        "runs": [io.fraction_report_to_dict(r) for r in reports],
    }
    prov = io.provenance(inputs={"povm": path}, seed=args.seed,
                         trials=args.trials, shots=args.shots)
    io.save_report(args.out, "fraction", payload, prov=prov)
    if args.csv:
        rows = [(r.z_mag, r.ratio, r.f, r.mean_alpha) for r in reports]
        io.write_csv(args.csv, ["z_mag", "ratio", "f", "mean_alpha"], rows)
    last = reports[-1]
    print(
        f"simulate-f: {len(reports)} run(s), trials={args.trials}, "
        f"f={last.f:.4f}, ratio={last.ratio:.4f} -> {args.out}"
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"qreadout {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (QReadoutError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"qreadout {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
