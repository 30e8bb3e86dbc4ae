"""Exception types shared across the package."""


class OccutimeError(Exception):
    """Base class for every package-specific error."""


class ValidationError(OccutimeError, ValueError):
    """A matrix or vector failed structural validation."""


class NonNegativeOffDiagonalViolation(ValidationError):
    """An off-diagonal rate is negative (names the offending entry)."""

    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"off-diagonal entry ({row}, {col}) = {value} is negative; "
                         "rates must be >= 0")


class PositiveRowSum(ValidationError):
    """A row of the generator gains mass (row sum > 0)."""

    def __init__(self, row, value):
        self.row, self.value = row, value
        super().__init__(f"row {row} sums to {value} > 0; generator rows must sum to <= 0")


class ZeroDiagonal(ValidationError):
    """A diagonal entry is zero, i.e. the state has no outgoing rate."""

    def __init__(self, row):
        self.row = row
        super().__init__(f"diagonal entry ({row}, {row}) is zero; every state needs a "
                         "positive total exit rate")


class NotConservative(ValidationError):
    """A generator declared full/conservative leaks mass from some row."""

    def __init__(self, row, deficit):
        self.row, self.deficit = row, deficit
        super().__init__(f"row {row} has exit rate {deficit} but the matrix was declared "
                         "a full conservative generator")


class NotSkipFree(ValidationError):
    """Operation requires a skip-free sub-generator."""


class NotTridiagonal(ValidationError):
    """Operation requires a tridiagonal (birth-death) generator."""


class ZeroBackRate(ValidationError):
    """Symmetrization needs a positive downward rate on every subdiagonal entry."""

    def __init__(self, row):
        self.row = row
        super().__init__(f"q[{row}, {row - 1}] = 0; detailed balance is undefined")


class NoKillingReachable(ValidationError):
    """Some state cannot reach any state with a positive kill/exit probability."""

    def __init__(self, states):
        self.states = tuple(states)
        super().__init__(f"states {self.states} never reach a killing state; "
                         "absorption would take forever")


class SingularMatrix(OccutimeError):
    """Determinant is below the scale-aware singularity tolerance."""


class NotPositiveDefinite(OccutimeError):
    """Cholesky pivot failure; carries the failing pivot index."""

    def __init__(self, pivot):
        self.pivot = pivot
        super().__init__(f"matrix is not positive definite (pivot {pivot} <= 0)")


class NonPositiveDeterminant(OccutimeError):
    """Total-mass formula requires det(A) > 0."""


class PathLengthExceeded(OccutimeError):
    """A simulated path ran past max_jumps without being absorbed or killed.

    Signals either a generator violating the almost-sure-absorption
    assumption or a pathologically small max_jumps.
    """

    def __init__(self, max_jumps, completed=None):
        self.max_jumps = max_jumps
        self.completed = completed
        extra = "" if completed is None else f" ({completed} paths completed before the failure)"
        super().__init__(f"path exceeded max_jumps = {max_jumps}{extra}")


class NotApplicable(OccutimeError):
    """The triple reduction only applies to non-tridiagonal inputs."""


class EliminationBreakdown(OccutimeError):
    """A pivot vanished during the triple reduction; internal consistency failure."""
