"""Synthetic-experiment engine and the fraction-of-successful-corrections
Monte Carlo.

Randomness policy: every drawn quantity comes from a counter-based
generator (Philox) keyed by ``seed ^ index``, so trial t of a run is the
same no matter how many trials surround it, and identical parameters
reproduce identical reports bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distances, mitigation, noise
from .errors import DimensionMismatchError, InvalidPovmError
from .kernels import simplex_project_rows
from .povm import readout_params, validate_povm
from .tomography import CalibrationRecord, pauli_state, probe_labels

DEFAULT_SHOTS = 8192
DEFAULT_PR_ERR = 0.01


def _stream(seed: int, index: int = 0) -> np.random.Generator:
    key = np.uint64(seed) ^ np.uint64(index)
    return np.random.Generator(np.random.Philox(key=key))


def _record_stream(seed: int, index: int) -> np.random.Generator:
    # SeedSequence mixing keeps streams distinct across (seed, index)
    # pairs, unlike xor, which would alias e.g. (9000, 1) and (9001, 0).
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def haar_state_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector drawn Haar-uniformly from the dim-dimensional sphere."""
    raw = rng.standard_normal(2 * dim)
    vec = raw[:dim] + 1j * raw[dim:]
    return vec / np.linalg.norm(vec)


def haar_state(dim: int, seed: int = 0) -> np.ndarray:
    """Haar-random pure density matrix (rank 1, unit trace)."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    vec = haar_state_vector(dim, _stream(seed))
    return np.outer(vec, vec.conj())


def sample_counts(probabilities, shots: int, seed: int = 0) -> np.ndarray:
    """One multinomial draw of ``shots`` outcomes from a distribution."""
    p = np.asarray(probabilities, dtype=np.float64)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("not a probability vector")
    pv = np.clip(p, 0.0, None)
    return _stream(seed).multinomial(shots, pv / pv.sum())


@dataclass(frozen=True)
class TvSummary:
    """Five-number-plus-mean summary of per-trial TV distances."""

    mean: float
    minimum: float
    q25: float
    median: float
    q75: float
    maximum: float

    @classmethod
    def of(cls, values: np.ndarray) -> "TvSummary":
        q25, median, q75 = np.quantile(values, [0.25, 0.5, 0.75])
        return cls(
            mean=float(values.mean()),
            minimum=float(values.min()),
            q25=float(q25),
            median=float(median),
            q75=float(q75),
            maximum=float(values.max()),
        )


@dataclass(frozen=True)
class FractionReport:
    """Aggregate outcome of one Monte Carlo correction experiment."""

    f: float
    mean_alpha: float
    ratio: float
    trials: int
    shots: int | None
    pr_err: float
    seed: int
    successes: int
    ties: int
    degenerate: bool
    epsilon: float
    delta: float
    norm_1to1: float
    coherent_distance: float
    distance_reference: distances.DistanceBound
    corrected_tv: TvSummary
    uncorrected_tv: TvSummary
    z_mag: float | None


def fraction_f(noisy, ideal, trials: int, shots: int | None = DEFAULT_SHOTS,
               pr_err: float = DEFAULT_PR_ERR, seed: int = 0) -> FractionReport:
    """Fraction of Haar-random states whose corrected statistics beat the
    raw ones.

    Per trial: draw a Haar state, compute its exact outcome distributions
    under both detectors, sample ``shots`` outcomes from the noisy one
    (``shots=None`` uses the exact probabilities), correct, project, and
    count the trial as a success when the corrected vector is strictly
    closer in TV to the ideal distribution than the raw frequencies (ties
    are failures).  Alphas enter the reported ratio only through their
    mean, matching how the certification budget is quoted.
    """
    noisy = validate_povm(noisy)
    ideal = validate_povm(ideal)
    if noisy.shape != ideal.shape:
        raise DimensionMismatchError(
            f"noisy shape {noisy.shape} does not match ideal {ideal.shape}"
        )
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n, dim, _ = noisy.shape

    decomposition = noise.classical_part(noisy, ideal)
    correction = noise.correction_matrix(decomposition.stochastic)
    reference = distances.operational_distance_bound(noisy, ideal)
    epsilon = (
        0.0 if shots is None
        else mitigation.statistical_epsilon(shots, n, pr_err)
    )
    delta = mitigation.delta_bound(
        correction.norm_1to1, decomposition.coherent_distance, epsilon
    )

    streams = [_stream(seed, t) for t in range(trials)]
    states = np.empty((trials, dim), dtype=np.complex128)
    for t, rng in enumerate(streams):
        states[t] = haar_state_vector(dim, rng)

    p_exp = np.einsum("ta,iab,tb->ti", states.conj(), noisy, states).real
    p_ideal = np.einsum("ta,iab,tb->ti", states.conj(), ideal, states).real
    np.clip(p_exp, 0.0, None, out=p_exp)
    np.clip(p_ideal, 0.0, None, out=p_ideal)

    if shots is None:
        freqs = p_exp / p_exp.sum(axis=1, keepdims=True)
    else:
        counts = np.empty((trials, n), dtype=np.int64)
        for t, rng in enumerate(streams):
            pv = p_exp[t] / p_exp[t].sum()
            counts[t] = rng.multinomial(shots, pv)
        freqs = counts / float(shots)

    raw = freqs @ correction.matrix.T
    needs_projection = raw.min(axis=1) < 0.0
    projected = simplex_project_rows(raw)
    corrected = np.where(needs_projection[:, np.newaxis], projected, raw)
    alphas = np.where(
        needs_projection, 0.5 * np.abs(raw - projected).sum(axis=1), 0.0
    )

    tv_corrected = 0.5 * np.abs(corrected - p_ideal).sum(axis=1)
    tv_uncorrected = 0.5 * np.abs(freqs - p_ideal).sum(axis=1)
    successes = int(np.count_nonzero(tv_corrected < tv_uncorrected))
    ties = int(np.count_nonzero(tv_corrected == tv_uncorrected))

    mean_alpha = float(alphas.mean())
    denominator = reference.lower + epsilon
    ratio = (delta + mean_alpha) / denominator if denominator > 0.0 else math.nan

    z_mag = readout_params(noisy).z_mag if noisy.shape == (2, 2, 2) else None
    return FractionReport(
        f=successes / trials,
        mean_alpha=mean_alpha,
        ratio=ratio,
        trials=trials,
        shots=shots,
        pr_err=pr_err,
        seed=seed,
        successes=successes,
        ties=ties,
        degenerate=ties == trials,
        epsilon=epsilon,
        delta=delta,
        norm_1to1=correction.norm_1to1,
        coherent_distance=decomposition.coherent_distance,
        distance_reference=reference,
        corrected_tv=TvSummary.of(tv_corrected),
        uncorrected_tv=TvSummary.of(tv_uncorrected),
        z_mag=z_mag,
    )


def coherent_readout_povm(p: float, q: float, z: complex) -> np.ndarray:
    """Single-qubit detector with misassignment (p, q) and off-diagonal z.

    Raises
    ------
    InvalidPovmError
        When |z| is too large for both effects to stay positive.
    """
    effects = np.array(
        [
            [[1.0 - p, z], [np.conj(z), q]],
            [[p, -z], [-np.conj(z), 1.0 - q]],
        ],
        dtype=np.complex128,
    )
    for i in range(2):
        if float(np.linalg.eigvalsh(effects[i])[0]) < -1e-9:
            raise InvalidPovmError(
                f"off-diagonal magnitude {abs(z)!r} breaks positivity at p={p!r}, q={q!r}"
            )
    return effects


def max_coherent_magnitude(p: float, q: float) -> float:
    """Largest |z| keeping both effects of the coherent detector positive."""
    return math.sqrt(min((1.0 - p) * q, p * (1.0 - q)))


def coherent_sweep(p: float, q: float, z_values, trials: int,
                   shots: int | None = DEFAULT_SHOTS, pr_err: float = DEFAULT_PR_ERR,
                   seed: int = 0) -> list[FractionReport]:
    """Monte Carlo runs over a range of coherent-error magnitudes.

    All sweep points share the same trial streams (common random numbers),
    so the f-vs-ratio curve is smooth in z and deterministic per seed.
    """
    ideal = np.zeros((2, 2, 2), dtype=np.complex128)
    ideal[0, 0, 0] = 1.0
    ideal[1, 1, 1] = 1.0
    reports = []
    for z in z_values:
        effects = coherent_readout_povm(p, q, z)
        reports.append(
            fraction_f(effects, ideal, trials=trials, shots=shots,
                       pr_err=pr_err, seed=seed)
        )
    return reports


def synthetic_calibration(effects, num_qubits: int, probe_set: str = "overcomplete",
                          shots: int = DEFAULT_SHOTS, seed: int = 0) -> list[CalibrationRecord]:
    """Simulated calibration data for a known detector.

    One record per probe label, with counts drawn from the exact Born
    distribution on an independent stream per (seed, record) pair.
    """
    effects = validate_povm(effects)
    labels = probe_labels(num_qubits, probe_set)
    records = []
    for index, label in enumerate(labels):
        rho = pauli_state(label)
        if rho.shape != effects.shape[1:]:
            raise DimensionMismatchError(
                f"{num_qubits}-qubit probes do not match effects of dim {effects.shape[1]}"
            )
        p = np.einsum("ab,iba->i", rho, effects).real
        np.clip(p, 0.0, None, out=p)
        counts = _record_stream(seed, index).multinomial(shots, p / p.sum())
        records.append(CalibrationRecord(label=label, shots=shots, counts=counts))
    return records
