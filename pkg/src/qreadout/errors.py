"""Exception types raised across the package.

Validation failures carry the offending numbers as attributes so callers
(and the CLI) can report them without re-deriving anything.
"""


class QReadoutError(Exception):
    """Base class for all package errors."""


class NonHermitianError(QReadoutError):
    """Matrix expected to be Hermitian deviates beyond tolerance."""

    def __init__(self, deviation: float, tol: float):
        self.deviation = deviation
        self.tol = tol
        super().__init__(
            f"matrix is not Hermitian: max |A - A^dag| entry {deviation:.3e} "
            f"exceeds tolerance {tol:.1e}"
        )


class DimensionMismatchError(QReadoutError):
    """Operands have incompatible shapes or lengths."""


class NotPositiveError(QReadoutError):
    """A POVM effect (or density matrix) has a negative eigenvalue."""

    def __init__(self, index: int, min_eigenvalue: float):
        self.index = index
        self.min_eigenvalue = min_eigenvalue
        super().__init__(
            f"effect {index} is not positive semidefinite "
            f"(min eigenvalue {min_eigenvalue:.3e})"
        )


class NotCompleteError(QReadoutError):
    """POVM effects do not sum to the identity."""

    def __init__(self, deviation_norm: float):
        self.deviation_norm = deviation_norm
        super().__init__(
            f"effects do not sum to identity (deviation norm {deviation_norm:.3e})"
        )


class NotProjectiveIdealError(QReadoutError):
    """The reference measurement is not the diagonal projective one."""


class ColumnSumViolationError(QReadoutError):
    """A column of an extracted stochastic matrix strays too far from 1."""

    def __init__(self, column: int, deviation: float):
        self.column = column
        self.deviation = deviation
        super().__init__(
            f"column {column} sums to 1{deviation:+.3e}; "
            "measured effects are too far from a valid POVM"
        )


class SingularMatrixError(QReadoutError):
    """Stochastic matrix is not invertible to working precision."""

    def __init__(self, condition_estimate: float):
        self.condition_estimate = condition_estimate
        super().__init__(
            f"matrix is singular or near-singular "
            f"(condition estimate {condition_estimate:.3e})"
        )


class TooManyOutcomesError(QReadoutError):
    """Exact subset enumeration requested above the outcome cap."""

    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap
        super().__init__(
            f"exact enumeration over {n} outcomes exceeds the cap of {cap}; "
            "use the sampled lower bound"
        )


class BadLabelError(QReadoutError):
    """Preparation-state label does not parse."""


class RankDeficientError(QReadoutError):
    """Probe states do not span the operator space."""

    def __init__(self, rank: int, needed: int):
        self.rank = rank
        self.needed = needed
        super().__init__(
            f"probe states span a rank-{rank} operator subspace; {needed} required"
        )


class SumViolationError(QReadoutError):
    """Quasi-probability vector does not sum to 1 within tolerance."""

    def __init__(self, total: float, tol: float):
        self.total = total
        self.tol = tol
        super().__init__(
            f"vector sums to {total!r}, outside 1 +/- {tol:.1e}"
        )


class InvalidPovmError(QReadoutError):
    """A constructed POVM (e.g. a sweep point) is not valid."""


class OutOfRangeError(QReadoutError, ValueError):
    """Scalar parameter outside its documented domain."""
