"""Classical correction of measured statistics with a certified error budget.

The pipeline: multiply observed frequencies by the inverse noise matrix,
project back onto the probability simplex if the result left it, and put
numbers on everything that can have gone wrong — the statistical deviation
of frequencies (epsilon), its amplification plus the coherent residual
(delta), and the projection cost (alpha).  Correction counts as successful
when the certified error delta + alpha is strictly smaller than the
distance the uncorrected detector had to the ideal one (plus epsilon).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distances import DistanceBound, tv_distance
from .errors import DimensionMismatchError, OutOfRangeError, SumViolationError
from .kernels import simplex_project_rows
from .noise import Correction

SIMPLEX_SUM_TOL = 1e-6


def correct(frequencies, correction) -> np.ndarray:
    """Apply the inverse noise matrix; result may leave the simplex.

    ``correction`` may be a :class:`qreadout.noise.Correction` or a plain
    matrix.  The output sums to whatever the input summed to (the inverse
    of a left-stochastic matrix preserves column sums).
    """
    matrix = correction.matrix if isinstance(correction, Correction) else np.asarray(correction, dtype=np.float64)
    frequencies = np.asarray(frequencies, dtype=np.float64)
    if frequencies.ndim != 1 or matrix.shape != (frequencies.size, frequencies.size):
        raise DimensionMismatchError(
            f"cannot apply {matrix.shape} correction to length-{frequencies.size} vector"
        )
    return matrix @ frequencies


def project_to_simplex(v, sum_tol: float = SIMPLEX_SUM_TOL) -> tuple[np.ndarray, float]:
    """Euclidean projection onto the probability simplex, and its TV cost.

    Returns ``(projected, alpha)`` with alpha = half the l1 change.  A
    vector that is already a probability vector is returned unchanged with
    alpha exactly 0.

    Raises
    ------
    SumViolationError
        If the entries do not sum to 1 within ``sum_tol`` — that signals a
        bug upstream, not statistical noise.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {v.shape}")
    total = float(v.sum())
    if abs(total - 1.0) > sum_tol:
        raise SumViolationError(total, sum_tol)
    if v.min() >= 0.0:
        return v.copy(), 0.0
    projected = simplex_project_rows(v[np.newaxis, :])[0]
    return projected, tv_distance(v, projected)


def statistical_epsilon(shots: int, num_outcomes: int, pr_err: float = 0.01) -> float:
    """Frequency-deviation bound holding with probability 1 - pr_err.

    sqrt((log(2^n - 2) - log pr_err) / (2 N)) for N shots over n outcomes,
    natural logarithms.
    """
    if shots < 1:
        raise OutOfRangeError(f"shots must be >= 1, got {shots}")
    if num_outcomes < 2:
        raise OutOfRangeError(f"need at least 2 outcomes, got {num_outcomes}")
    if not 0.0 < pr_err < 1.0:
        raise OutOfRangeError(f"pr_err must lie in (0, 1), got {pr_err!r}")
    return math.sqrt(
        (math.log(2**num_outcomes - 2) - math.log(pr_err)) / (2.0 * shots)
    )


def delta_bound(norm_1to1: float, coherent_distance: float, epsilon: float) -> float:
    """Certified TV error of the corrected vector (before projection cost)."""
    if min(norm_1to1, coherent_distance, epsilon) < 0.0:
        raise OutOfRangeError("delta_bound arguments must be nonnegative")
    return norm_1to1 * (epsilon + coherent_distance)


@dataclass(frozen=True)
class ErrorBudget:
    """Everything the certification of one corrected vector rests on."""

    epsilon: float
    norm_1to1: float
    coherent_distance: float
    delta: float
    alpha: float
    shots: int | None
    pr_err: float

    @property
    def total(self) -> float:
        return self.delta + self.alpha


@dataclass(frozen=True)
class MitigationReport:
    corrected: np.ndarray
    raw: np.ndarray
    budget: ErrorBudget
    distance_reference: DistanceBound
    rhs_bound: float
    successful: bool
    projection_applied: bool

    @property
    def margin(self) -> float:
        return self.rhs_bound - self.budget.total


def assess(budget: ErrorBudget, reference: DistanceBound) -> tuple[bool, float]:
    """Success rule: certified error strictly below reference distance + epsilon.

    The reference uses the lower bound when only a bracket is known (being
    conservative about claiming success), and ties count as failure.
    """
    rhs = reference.lower + budget.epsilon
    return budget.total < rhs, rhs


def mitigate(frequencies, correction: Correction, coherent_distance: float,
             reference: DistanceBound, shots: int | None = None,
             pr_err: float = 0.01) -> MitigationReport:
    """Full correction pipeline for one frequency vector.

    Parameters
    ----------
    frequencies : length-n probability vector
        Observed relative frequencies (or exact probabilities).
    correction : Correction
        Inverse noise matrix with its norm diagnostics.
    coherent_distance : float
        Operational distance between the measured detector and the
        classical model being inverted.
    reference : DistanceBound
        Distance between the measured and ideal detectors (right-hand side
        of the success rule).
    shots : int or None
        Sample size behind ``frequencies``; ``None`` means exact
        probabilities, which sets epsilon to 0.
    """
    frequencies = np.asarray(frequencies, dtype=np.float64)
    raw = correct(frequencies, correction)
    corrected, alpha = project_to_simplex(raw)
    if shots is None:
        epsilon = 0.0
    else:
        epsilon = statistical_epsilon(shots, frequencies.size, pr_err)
    budget = ErrorBudget(
        epsilon=epsilon,
        norm_1to1=correction.norm_1to1,
        coherent_distance=coherent_distance,
        delta=delta_bound(correction.norm_1to1, coherent_distance, epsilon),
        alpha=alpha,
        shots=shots,
        pr_err=pr_err,
    )
    successful, rhs = assess(budget, reference)
    return MitigationReport(
        corrected=corrected,
        raw=raw,
        budget=budget,
        distance_reference=reference,
        rhs_bound=rhs,
        successful=successful,
        projection_applied=bool(raw.min() < 0.0),
    )
