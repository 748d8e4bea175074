"""Distinguishability measures between outcome statistics and detectors.

Two POVMs are compared by the worst case, over all input states, of the
total-variation distance between the outcome distributions they generate.
That worst case equals a maximum of operator norms over outcome subsets,
which is what the functions here evaluate: exactly (subset enumeration, with
a closed-form shortcut for diagonal effects), or from below (seeded subset
sampling), or from above (subadditivity over tensor factors).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, OutOfRangeError, TooManyOutcomesError
from .kernels import max_subset_norm, max_subset_norm_diag

ENUMERATION_CAP = 16
DEFAULT_SUBSET_SAMPLES = 1 << 17
DIAGONAL_TOL = 1e-12

METHOD_EXACT = "exact"
METHOD_SAMPLED_LOWER = "sampled_lower"
METHOD_SUBADDITIVE_UPPER = "subadditive_upper"
METHOD_CLASSICAL = "classical_closed_form"
METHOD_COMBINED = "combined"


@dataclass(frozen=True)
class DistanceBound:
    """Lower/upper bracket on an operational distance, tagged with the
    method that produced it."""

    lower: float
    upper: float
    method: str

    def __post_init__(self):
        if not (-1e-12 <= self.lower <= self.upper <= 1.0 + 1e-9):
            raise OutOfRangeError(
                f"invalid bound: lower={self.lower!r} upper={self.upper!r}"
            )

    @property
    def is_exact(self) -> bool:
        return self.method in (METHOD_EXACT, METHOD_CLASSICAL)


def tv_distance(p, q) -> float:
    """Total-variation distance, half the l1 distance.

    Accepts quasi-probability vectors (negative entries allowed) so the
    projection cost alpha can be measured with the same function.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise DimensionMismatchError(
            f"tv_distance needs two equal-length vectors, got {p.shape} and {q.shape}"
        )
    return 0.5 * float(np.abs(p - q).sum())


def _difference_stack(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape or a.ndim != 3:
        raise DimensionMismatchError(
            f"expected two effect stacks of equal shape, got {a.shape} and {b.shape}"
        )
    diffs = a - b
    return (diffs + np.conj(np.swapaxes(diffs, 1, 2))) / 2.0


def _diagonal_part(diffs: np.ndarray):
    """Real diagonals if every off-diagonal magnitude is below tolerance."""
    off = diffs.copy()
    idx = np.arange(diffs.shape[1])
    off[:, idx, idx] = 0.0
    if np.abs(off).max() < DIAGONAL_TOL:
        return np.ascontiguousarray(diffs[:, idx, idx].real)
    return None


def _half_masks(n: int) -> np.ndarray:
    # one representative of each subset/complement pair: subsets omitting
    # the last outcome (the difference operators sum to zero, so a subset
    # and its complement give the same norm)
    return np.arange(1, 1 << (n - 1), dtype=np.int64) if n > 1 else np.empty(0, np.int64)


def operational_distance_exact(a, b, cap: int = ENUMERATION_CAP) -> float:
    """Worst-case TV distance between the statistics of two POVMs.

    Evaluates max over outcome subsets x of the operator norm of
    sum_{i in x} (A_i - B_i).  Diagonal pairs route to the column closed
    form (no cap); otherwise the 2^(n-1) non-redundant subsets are
    enumerated, which is capped at ``cap`` outcomes.

    Raises
    ------
    TooManyOutcomesError
        If n exceeds ``cap`` and the effects are not all diagonal.
    """
    diffs = _difference_stack(a, b)
    n = diffs.shape[0]
    diag = _diagonal_part(diffs)
    if diag is not None:
        # max over columns of the TV distance, optimal subset = positive part
        return 0.5 * float(np.abs(diag).sum(axis=0).max())
    if n > cap:
        raise TooManyOutcomesError(n, cap)
    return max_subset_norm(diffs, _half_masks(n))


def operational_distance_lower(a, b, num_subsets: int = DEFAULT_SUBSET_SAMPLES,
                               seed: int = 0) -> float:
    """Lower bound on the operational distance from a seeded subset sample.

    Always evaluates every singleton subset and the subset of indices with
    positive trace difference, plus ``num_subsets`` masks drawn with a
    counter-based generator, so the result is deterministic per seed and
    never exceeds the exact value.
    """
    diffs = _difference_stack(a, b)
    n = diffs.shape[0]
    if n > 62:
        raise TooManyOutcomesError(n, 62)
    singletons = np.int64(1) << np.arange(n, dtype=np.int64)
    traces = np.einsum("iaa->i", diffs).real
    positive_mask = np.int64(0)
    for i in range(n):
        if traces[i] > 0.0:
            positive_mask |= np.int64(1) << np.int64(i)
    heuristics = [singletons, np.array([positive_mask], dtype=np.int64)]
    if num_subsets > 0 and n > 1:
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        sampled = rng.integers(1, 1 << n, size=num_subsets, dtype=np.int64)
        heuristics.append(sampled)
    masks = np.concatenate(heuristics)
    masks = masks[masks != 0]
    diag = _diagonal_part(diffs)
    if diag is not None:
        return max_subset_norm_diag(diag, masks)
    return max_subset_norm(diffs, masks)


def classical_operational_distance(l1, l2) -> float:
    """Exact operational distance between two classical (diagonal) detectors.

    Arguments are stochastic matrices whose column j is the outcome
    distribution for basis state j; the distance is the largest column TV
    distance, attained on a computational-basis state.
    """
    l1 = np.asarray(l1, dtype=np.float64)
    l2 = np.asarray(l2, dtype=np.float64)
    if l1.shape != l2.shape or l1.ndim != 2:
        raise DimensionMismatchError(
            f"expected two equal-shape matrices, got {l1.shape} and {l2.shape}"
        )
    return 0.5 * float(np.abs(l1 - l2).sum(axis=0).max())


def uncorrelated_product_distance(per_qubit_distances) -> float:
    """Distance of an uncorrelated product of classical noises to the ideal:
    1 - prod(1 - d_i)."""
    d = np.asarray(per_qubit_distances, dtype=np.float64)
    if d.size == 0:
        raise OutOfRangeError("need at least one per-qubit distance")
    if np.any((d < 0.0) | (d > 1.0)):
        raise OutOfRangeError(f"distances must lie in [0, 1], got {d!r}")
    return 1.0 - float(np.prod(1.0 - d))


def subadditive_upper(per_factor_distances) -> float:
    """Upper bound on a product-POVM distance: min(1, sum of factor distances)."""
    d = np.asarray(per_factor_distances, dtype=np.float64)
    if np.any((d < 0.0) | (d > 1.0)):
        raise OutOfRangeError(f"distances must lie in [0, 1], got {d!r}")
    return min(1.0, float(d.sum()))


def operational_distance_bound(a, b, factor_distances=None,
                               num_subsets: int = DEFAULT_SUBSET_SAMPLES,
                               seed: int = 0,
                               cap: int = ENUMERATION_CAP) -> DistanceBound:
    """Best available bracket on the operational distance.

    Exact when the pair is diagonal or small enough to enumerate; otherwise
    a sampled lower bound, tightened from above by subadditivity when the
    per-factor distances of a tensor-product structure are known.
    """
    diffs = _difference_stack(a, b)
    n = diffs.shape[0]
    if _diagonal_part(diffs) is not None:
        value = operational_distance_exact(a, b, cap=cap)
        return DistanceBound(value, value, METHOD_CLASSICAL)
    if n <= cap:
        value = operational_distance_exact(a, b, cap=cap)
        return DistanceBound(value, value, METHOD_EXACT)
    lower = operational_distance_lower(a, b, num_subsets=num_subsets, seed=seed)
    if factor_distances is not None:
        upper = subadditive_upper(factor_distances)
        method = METHOD_COMBINED
    else:
        upper = 1.0
        method = METHOD_SAMPLED_LOWER
    return DistanceBound(lower, max(lower, upper), method)
