"""POVM data model: validation, constructors, tensor products, Born statistics.

A POVM is represented as a ``(n, d, d)`` complex array of effects.  All
functions accept anything ``np.asarray`` can digest; validation returns the
canonical contiguous ``complex128`` stack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotCompleteError,
    NotPositiveError,
)
from .linalg import PAULI_0, PAULI_X, PAULI_Y, PAULI_Z, hermitian_part

PSD_TOL = -1e-9
COMPLETENESS_TOL = 1e-9
PROBABILITY_FLOOR = -1e-12
PROBABILITY_SUM_TOL = 1e-10
NEGATIVE_ROUNDOFF_CLAMP = 1e-14


def validate_povm(effects, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Check effects are Hermitian, PSD and complete; return the clean stack.

    Parameters
    ----------
    effects : array_like, shape (n, d, d)
        Candidate effects.
    psd_tol : float
        Most negative eigenvalue tolerated (roundoff allowance).

    Raises
    ------
    NotPositiveError
        If some effect has an eigenvalue below ``psd_tol``.
    NotCompleteError
        If the effects do not sum to the identity within operator norm 1e-9.
    """
    arr = np.asarray(effects, dtype=np.complex128)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimensionMismatchError(
            f"expected an (n, d, d) stack of effects, got shape {arr.shape}"
        )
    n, d, _ = arr.shape
    out = np.empty_like(arr)
    for i in range(n):
        out[i] = hermitian_part(arr[i])
        min_eig = float(np.linalg.eigvalsh(out[i])[0])
        if min_eig < psd_tol:
            raise NotPositiveError(i, min_eig)
    total = out.sum(axis=0) - np.eye(d)
    deviation = float(np.abs(np.linalg.eigvalsh(total)).max())
    if deviation > COMPLETENESS_TOL:
        raise NotCompleteError(deviation)
    return np.ascontiguousarray(out)


def diagonal_projective(dim: int) -> np.ndarray:
    """Rank-1 diagonal projectors onto each basis state of a dim-level system."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    effects = np.zeros((dim, dim, dim), dtype=np.complex128)
    for i in range(dim):
        effects[i, i, i] = 1.0
    return effects


def computational_basis_povm(num_qubits: int) -> np.ndarray:
    """The ideal detector: 2^K diagonal rank-1 projectors, binary order."""
    if num_qubits < 1:
        raise ValueError("num_qubits must be >= 1")
    return diagonal_projective(2**num_qubits)


def tensor_povm(*povms) -> np.ndarray:
    """Tensor product of POVMs; outcome (i, j) lands at flat index i*n_B + j.

    The first argument is the most significant factor (qubit 0 leftmost),
    consistent with :func:`qreadout.linalg.kron_all`.
    """
    stacks = [np.asarray(p, dtype=np.complex128) for p in povms]
    if not stacks:
        raise ValueError("tensor_povm needs at least one POVM")
    out = stacks[0]
    for nxt in stacks[1:]:
        n_a, d_a, _ = out.shape
        n_b, d_b, _ = nxt.shape
        combined = np.empty((n_a * n_b, d_a * d_b, d_a * d_b), dtype=np.complex128)
        for i in range(n_a):
            for j in range(n_b):
                combined[i * n_b + j] = np.kron(out[i], nxt[j])
        out = combined
    return out


def check_density_matrix(rho, trace_tol: float = 1e-10, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Validate a density matrix (Hermitian, PSD, unit trace)."""
    rho = hermitian_part(rho)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr!r} deviates from 1")
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < psd_tol:
        raise NotPositiveError(0, min_eig)
    return rho


def born_probabilities(rho: np.ndarray, effects: np.ndarray) -> np.ndarray:
    """Outcome distribution Tr(rho M_i) for each effect.

    Small negative roundoff (magnitude below 1e-14) is clamped to zero; a
    genuinely negative probability raises, as does a total straying from 1.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    effects = np.asarray(effects, dtype=np.complex128)
    if rho.shape != effects.shape[1:]:
        raise DimensionMismatchError(
            f"state dim {rho.shape} does not match effect dim {effects.shape[1:]}"
        )
    p = np.einsum("ab,iba->i", rho, effects).real
    tiny = (p < 0) & (p > NEGATIVE_ROUNDOFF_CLAMP * -1.0)
    p[tiny] = 0.0
    if p.min() < PROBABILITY_FLOOR:
        raise ValueError(f"negative probability {p.min()!r} from Born rule")
    total = float(p.sum())
    if abs(total - 1.0) > PROBABILITY_SUM_TOL:
        raise ValueError(f"Born probabilities sum to {total!r}, not 1")
    return p


@dataclass(frozen=True)
class ReadoutParams:
    """Single-qubit readout-error parameters of a 2-outcome POVM.

    ``p`` and ``q`` are the probabilities of misreading 0 as 1 and 1 as 0;
    ``z_mag`` is the magnitude of the off-diagonal (coherent) part of the
    first effect; ``n0``/``nz`` complete its Pauli decomposition.
    """

    n0: float
    nx: float
    ny: float
    nz: float
    p: float
    q: float

    @property
    def z_mag(self) -> float:
        return float(np.hypot(self.nx, self.ny))

    def first_effect(self) -> np.ndarray:
        """Reconstruct M_1 from the Pauli components."""
        return (
            self.n0 * PAULI_0
            + self.nx * PAULI_X
            + self.ny * PAULI_Y
            + self.nz * PAULI_Z
        )


def readout_params(effects: np.ndarray) -> ReadoutParams:
    """Pauli decomposition and (p, q, |z|) of a single-qubit 2-outcome POVM."""
    effects = np.asarray(effects, dtype=np.complex128)
    if effects.shape != (2, 2, 2):
        raise DimensionMismatchError(
            f"readout_params needs a 2-outcome qubit POVM, got shape {effects.shape}"
        )
    m1 = effects[0]
    comps = [float(np.sum(m1 * s.T).real) / 2.0 for s in (PAULI_0, PAULI_X, PAULI_Y, PAULI_Z)]
    p = 1.0 - float(m1[0, 0].real)
    q = float(m1[1, 1].real)
    return ReadoutParams(n0=comps[0], nx=comps[1], ny=comps[2], nz=comps[3], p=p, q=q)
