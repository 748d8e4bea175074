"""Small dense complex-matrix helpers shared by every other module.

Everything here works on plain ``numpy.ndarray`` objects; matrices are
``complex128`` and kept Hermitian by explicit symmetrization at the few
places where roundoff can accumulate.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, NonHermitianError

HERMITICITY_TOL = 1e-10

PAULI_0 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

PAULIS = (PAULI_0, PAULI_X, PAULI_Y, PAULI_Z)


def hermitian_part(a: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Symmetrize ``a`` to (A + A^dag)/2, rejecting genuinely non-Hermitian input.

    Raises
    ------
    NonHermitianError
        If any entry of ``A - A^dag`` exceeds ``tol`` in magnitude.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError("matrix contains NaN or Inf entries")
    deviation = float(np.abs(a - a.conj().T).max())
    if deviation > tol:
        raise NonHermitianError(deviation, tol)
    return (a + a.conj().T) / 2.0


def hermitian_eigenvalues(a: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending."""
    return np.linalg.eigvalsh(hermitian_part(a, tol))


def operator_norm(a: np.ndarray, tol: float = HERMITICITY_TOL) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    w = hermitian_eigenvalues(a, tol)
    return float(max(abs(w[0]), abs(w[-1])))


def trace_product(a: np.ndarray, b: np.ndarray) -> complex:
    """Tr(A B) without forming the product matrix."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(
            f"trace_product needs two square matrices of equal dim, "
            f"got {a.shape} and {b.shape}"
        )
    return complex(np.sum(a * b.T))


def kron_all(factors) -> np.ndarray:
    """Kronecker product of a sequence of matrices, first factor leftmost.

    The row-major block convention of ``numpy.kron`` makes the first factor
    the most significant index, which is the bit convention used throughout:
    qubit 0 is the most significant bit of an outcome index.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("kron_all needs at least one factor")
    out = np.asarray(factors[0], dtype=np.complex128)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=np.complex128))
    return out
