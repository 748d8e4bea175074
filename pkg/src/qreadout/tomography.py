"""Detector reconstruction from calibration statistics.

Probe states are products of single-qubit Pauli eigenstates, labelled by
per-qubit tokens (``"z+ x-"`` prepares qubit 0 in the +z eigenstate and
qubit 1 in the -x eigenstate).  Reconstruction is either plain linear
inversion in an operator basis (fast, possibly nonphysical) or the
positivity-preserving maximum-likelihood fixed point (the default
everywhere it matters).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadLabelError,
    DimensionMismatchError,
    RankDeficientError,
)
from .kernels import mle_fixed_point
from .linalg import kron_all
from .povm import validate_povm

MLE_DEFAULT_TOL = 1e-10
MLE_DEFAULT_MAX_ITER = 10_000

_QUBIT_TOKENS = {
    "z+": np.array([[1, 0], [0, 0]], dtype=np.complex128),
    "z-": np.array([[0, 0], [0, 1]], dtype=np.complex128),
    "x+": np.array([[0.5, 0.5], [0.5, 0.5]], dtype=np.complex128),
    "x-": np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=np.complex128),
    "y+": np.array([[0.5, -0.5j], [0.5j, 0.5]], dtype=np.complex128),
    "y-": np.array([[0.5, 0.5j], [-0.5j, 0.5]], dtype=np.complex128),
}

MINIMAL_TOKENS = ("x+", "y+", "z+", "z-")
OVERCOMPLETE_TOKENS = ("x+", "x-", "y+", "y-", "z+", "z-")
PROBE_SETS = {"minimal": MINIMAL_TOKENS, "overcomplete": OVERCOMPLETE_TOKENS}


def pauli_state(label: str) -> np.ndarray:
    """Density matrix of the product Pauli eigenstate named by ``label``."""
    tokens = label.split()
    if not tokens:
        raise BadLabelError(f"empty preparation label {label!r}")
    try:
        factors = [_QUBIT_TOKENS[t] for t in tokens]
    except KeyError as exc:
        raise BadLabelError(
            f"unknown token {exc.args[0]!r} in label {label!r}; "
            f"valid tokens: {sorted(_QUBIT_TOKENS)}"
        ) from None
    return kron_all(factors)


def probe_labels(num_qubits: int, probe_set: str = "overcomplete") -> list[str]:
    """All probe labels for ``num_qubits`` qubits, in deterministic order."""
    if probe_set not in PROBE_SETS:
        raise BadLabelError(
            f"unknown probe set {probe_set!r}; choose from {sorted(PROBE_SETS)}"
        )
    tokens = PROBE_SETS[probe_set]
    return [" ".join(combo) for combo in itertools.product(tokens, repeat=num_qubits)]


@dataclass(frozen=True)
class CalibrationRecord:
    """Counts observed after preparing the state named by ``label``."""

    label: str
    shots: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if self.shots <= 0:
            raise ValueError(f"record {self.label!r}: shots must be positive")
        if counts.min() < 0:
            raise ValueError(f"record {self.label!r}: negative count")
        if int(counts.sum()) != self.shots:
            raise ValueError(
                f"record {self.label!r}: counts sum to {int(counts.sum())}, "
                f"declared shots {self.shots}"
            )

    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots


def calibration_matrices(records) -> tuple[np.ndarray, np.ndarray]:
    """Stack records into (probes, frequencies) arrays for the fitters."""
    records = list(records)
    if not records:
        raise ValueError("no calibration records")
    probes = np.stack([pauli_state(r.label) for r in records])
    n_outcomes = {r.counts.shape[0] for r in records}
    if len(n_outcomes) != 1:
        raise DimensionMismatchError(
            f"records disagree on outcome count: {sorted(n_outcomes)}"
        )
    freqs = np.stack([r.frequencies() for r in records])
    return probes, freqs


def _hermitian_basis(d: int) -> np.ndarray:
    """A real-spanning basis of the d x d Hermitian matrices (d^2 elements)."""
    basis = np.zeros((d * d, d, d), dtype=np.complex128)
    k = 0
    for a in range(d):
        basis[k, a, a] = 1.0
        k += 1
    for a in range(d):
        for b in range(a + 1, d):
            basis[k, a, b] = 1.0
            basis[k, b, a] = 1.0
            k += 1
            basis[k, a, b] = -1.0j
            basis[k, b, a] = 1.0j
            k += 1
    return basis


def _probe_design(probes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = probes.shape[1]
    basis = _hermitian_basis(d)
    design = np.einsum("lab,kba->lk", probes, basis).real
    return design, basis


def _require_spanning(design: np.ndarray, d: int) -> None:
    rank = int(np.linalg.matrix_rank(design))
    if rank < d * d:
        raise RankDeficientError(rank, d * d)


def linear_inversion(probes: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """Solve for effects reproducing the frequencies in least squares.

    Output is Hermitian by construction (real coordinates in a Hermitian
    operator basis) but not necessarily positive; it is the standard quick
    diagnostic and the seed for judging MLE quality.

    Raises
    ------
    RankDeficientError
        If the probe states do not span the operator space.
    """
    probes = np.asarray(probes, dtype=np.complex128)
    freqs = np.asarray(freqs, dtype=np.float64)
    if probes.shape[0] != freqs.shape[0]:
        raise DimensionMismatchError(
            f"{probes.shape[0]} probe states vs {freqs.shape[0]} frequency rows"
        )
    design, basis = _probe_design(probes)
    _require_spanning(design, probes.shape[1])
    coords, *_ = np.linalg.lstsq(design, freqs, rcond=None)
    return np.einsum("ki,kab->iab", coords, basis)


@dataclass(frozen=True)
class MleDiagnostics:
    """Convergence record of one likelihood fit."""

    iterations: int
    final_change: float
    converged: bool
    log_likelihoods: np.ndarray = field(repr=False)

    @property
    def log_likelihood(self) -> float:
        return float(self.log_likelihoods[-1])


def mle_fit(probes: np.ndarray, freqs: np.ndarray, tol: float = MLE_DEFAULT_TOL,
            max_iter: int = MLE_DEFAULT_MAX_ITER,
            initial: np.ndarray | None = None):
    """Maximum-likelihood detector fit via the fixed-point iteration.

    Starting from maximally mixed effects (identity / n), each round
    rescales every effect by its likelihood gradient from both sides and
    restores completeness with the inverse square root of the effect sum.
    Positivity and completeness are preserved exactly, so the output always
    validates as a POVM.

    Returns
    -------
    (effects, MleDiagnostics)
        ``diagnostics.converged`` is False when ``max_iter`` ran out before
        the largest per-effect Frobenius step dropped to ``tol``; the best
        iterate is still returned.
    """
    probes = np.asarray(probes, dtype=np.complex128)
    freqs = np.asarray(freqs, dtype=np.float64)
    if probes.shape[0] != freqs.shape[0]:
        raise DimensionMismatchError(
            f"{probes.shape[0]} probe states vs {freqs.shape[0]} frequency rows"
        )
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    design, _ = _probe_design(probes)
    _require_spanning(design, probes.shape[1])

    n = freqs.shape[1]
    d = probes.shape[1]
    if initial is None:
        initial = np.broadcast_to(np.eye(d, dtype=np.complex128) / n, (n, d, d))
    effects, iterations, final_change, ll_path = mle_fixed_point(
        probes, freqs, initial, tol, max_iter
    )
    effects = validate_povm(effects)
    diagnostics = MleDiagnostics(
        iterations=iterations,
        final_change=final_change,
        converged=final_change <= tol,
        log_likelihoods=ll_path,
    )
    return effects, diagnostics
