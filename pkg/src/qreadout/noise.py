"""Classical/coherent split of detector noise and the correction matrix.

A measured detector close to the ideal projective one decomposes as a
left-stochastic matrix acting on the ideal effects (the classical,
post-processing-equivalent part, read off the effect diagonals) plus a
residual of off-diagonal content (the coherent part).  Correcting measured
statistics means applying the inverse of the stochastic part; its max
column l1 norm is the amplification factor every error bound pays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import distances
from .errors import (
    ColumnSumViolationError,
    DimensionMismatchError,
    NotProjectiveIdealError,
    OutOfRangeError,
    SingularMatrixError,
)
from .linalg import kron_all

STOCHASTIC_ENTRY_TOL = 1e-9
COLUMN_SUM_TOL = 1e-9
COLUMN_RENORM_TOL = 1e-6
SINGULAR_DET_TOL = 1e-12
INVERSE_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class NoiseDecomposition:
    """Split of a measured POVM into stochastic-times-ideal plus residual."""

    stochastic: np.ndarray
    residuals: np.ndarray
    coherent_distance: float
    coherent_method: str
    column_residual: float

    def classical_effects(self) -> np.ndarray:
        """The effects of the classical part: diag of each stochastic row."""
        n = self.stochastic.shape[0]
        out = np.zeros((n, n, n), dtype=np.complex128)
        idx = np.arange(n)
        for i in range(n):
            out[i, idx, idx] = self.stochastic[i]
        return out


@dataclass(frozen=True)
class Correction:
    """Inverse of a stochastic noise matrix, with diagnostics."""

    source: np.ndarray
    matrix: np.ndarray
    norm_1to1: float
    condition: float


def check_stochastic(mat) -> np.ndarray:
    """Validate a left-stochastic matrix (entries in [0,1], columns sum to 1)."""
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {mat.shape}")
    if mat.min() < -STOCHASTIC_ENTRY_TOL or mat.max() > 1.0 + STOCHASTIC_ENTRY_TOL:
        raise OutOfRangeError(
            f"stochastic entries must lie in [0, 1]; range is "
            f"[{mat.min()!r}, {mat.max()!r}]"
        )
    colsums = mat.sum(axis=0)
    worst = int(np.argmax(np.abs(colsums - 1.0)))
    if abs(colsums[worst] - 1.0) > COLUMN_SUM_TOL:
        raise ColumnSumViolationError(worst, float(colsums[worst] - 1.0))
    return mat


def one_to_one_norm(mat) -> float:
    """Max over columns of the column l1 norm (the induced l1->l1 norm)."""
    mat = np.asarray(mat, dtype=np.float64)
    return float(np.abs(mat).sum(axis=0).max())


def single_qubit_stochastic(p: float, q: float) -> np.ndarray:
    """2x2 noise matrix from the two misassignment probabilities.

    ``p`` is the probability of reading 1 when 0 was prepared, ``q`` the
    reverse; columns are the outcome distributions for inputs 0 and 1.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise OutOfRangeError(f"p and q must lie in [0, 1], got p={p!r} q={q!r}")
    return np.array([[1.0 - p, q], [p, 1.0 - q]], dtype=np.float64)


def product_stochastic(factors) -> np.ndarray:
    """Kronecker product of per-qubit noise matrices, qubit 0 leftmost."""
    checked = [check_stochastic(f) for f in factors]
    return kron_all(checked).real


def _require_projective_ideal(ideal: np.ndarray) -> int:
    n, d, _ = ideal.shape
    if n != d:
        raise NotProjectiveIdealError(
            f"ideal measurement must have one effect per basis state, got {n} effects in dim {d}"
        )
    expected = np.zeros_like(ideal)
    for i in range(n):
        expected[i, i, i] = 1.0
    if np.abs(ideal - expected).max() > 1e-12:
        raise NotProjectiveIdealError(
            "ideal measurement must be the computational-basis projective one"
        )
    return n


def classical_part(measured, ideal=None, num_subsets: int = distances.DEFAULT_SUBSET_SAMPLES,
                   seed: int = 0) -> NoiseDecomposition:
    """Extract the stochastic part of a measured detector and what it misses.

    The stochastic entry (i, j) is the real diagonal entry j of measured
    effect i, i.e. the probability of outcome i on basis state j.  Columns
    off by at most 1e-6 are renormalized (the deviation is recorded);
    larger deviations raise.  The residual effects and their operational
    distance from zero quantify the coherent part of the noise.

    Parameters
    ----------
    measured : (n, d, d) effects with n = d
    ideal : optional
        The reference measurement; must be the computational-basis
        projective POVM (the default when omitted).
    """
    measured = np.asarray(measured, dtype=np.complex128)
    if measured.ndim != 3 or measured.shape[1] != measured.shape[2]:
        raise DimensionMismatchError(f"expected (n, d, d) effects, got {measured.shape}")
    if ideal is None:
        n = measured.shape[0]
        if n != measured.shape[1]:
            raise NotProjectiveIdealError(
                f"measured POVM has {n} effects in dim {measured.shape[1]}; "
                "a projective-shaped detector (n = d) is required"
            )
    else:
        ideal = np.asarray(ideal, dtype=np.complex128)
        if ideal.shape != measured.shape:
            raise DimensionMismatchError(
                f"measured shape {measured.shape} does not match ideal {ideal.shape}"
            )
        n = _require_projective_ideal(ideal)
        if n != measured.shape[0]:
            raise DimensionMismatchError("ideal and measured outcome counts differ")

    idx = np.arange(n)
    stochastic = measured[:, idx, idx].real.copy()
    colsums = stochastic.sum(axis=0)
    deviations = colsums - 1.0
    worst = int(np.argmax(np.abs(deviations)))
    column_residual = float(deviations[worst])
    if abs(column_residual) > COLUMN_RENORM_TOL:
        raise ColumnSumViolationError(worst, column_residual)
    stochastic /= colsums[np.newaxis, :]

    classical = np.zeros_like(measured)
    for i in range(n):
        classical[i, idx, idx] = stochastic[i]
    residuals = measured - classical

    if n <= distances.ENUMERATION_CAP:
        coherent = distances.operational_distance_exact(measured, classical)
        method = distances.METHOD_EXACT
    else:
        coherent = distances.operational_distance_lower(
            measured, classical, num_subsets=num_subsets, seed=seed
        )
        method = distances.METHOD_SAMPLED_LOWER
    return NoiseDecomposition(
        stochastic=stochastic,
        residuals=residuals,
        coherent_distance=coherent,
        coherent_method=method,
        column_residual=column_residual,
    )


def correction_matrix(stochastic) -> Correction:
    """Invert a stochastic noise matrix, with singularity guards.

    Raises
    ------
    SingularMatrixError
        If |det| falls below 1e-12 or the inverse fails the identity
        residual check at 1e-8.
    """
    lam = check_stochastic(stochastic)
    sign, logdet = np.linalg.slogdet(lam)
    if sign == 0.0 or np.exp(logdet) < SINGULAR_DET_TOL:
        raise SingularMatrixError(np.inf)
    try:
        inv = np.linalg.inv(lam)
    except np.linalg.LinAlgError:
        raise SingularMatrixError(np.inf) from None
    residual = float(np.abs(inv @ lam - np.eye(lam.shape[0])).max())
    condition = one_to_one_norm(lam) * one_to_one_norm(inv)
    if residual > INVERSE_RESIDUAL_TOL:
        raise SingularMatrixError(condition)
    return Correction(
        source=lam,
        matrix=inv,
        norm_1to1=one_to_one_norm(inv),
        condition=condition,
    )
