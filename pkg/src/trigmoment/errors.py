"""Exception hierarchy shared by the package."""


class MomentProblemError(Exception):
    """Base class for all anticipated failures."""


class InvalidMomentsError(MomentProblemError, ValueError):
    """Moment data violates the data model (shapes, Hermitian S_0, ...)."""


class MomentFileError(MomentProblemError):
    """Base class for problems reading a moment or measure file."""


class MalformedJSONError(MomentFileError):
    pass


class MissingFieldError(MomentFileError):
    pass


class DimensionMismatchError(MomentFileError):
    pass


class BlockShapeError(MomentFileError):
    pass


class ComputationError(MomentProblemError):
    """A numerical routine failed (eigensolver, LU, ...)."""


class NotSolvableError(MomentProblemError):
    """The block Toeplitz form is not positive semidefinite."""

    def __init__(self, lambda_min: float, tol: float):
        super().__init__(f"Toeplitz form is not PSD: lambda_min={lambda_min:.6g} < -{tol:.3g}")
        self.lambda_min = lambda_min
        self.tol = tol


class WellDefinednessError(ComputationError):
    """X^*X != Y^*Y beyond tolerance: the Gram factor is inconsistent."""


class RankInconsistencyError(ComputationError):
    pass


class SingularBlockError(ComputationError):
    """Raised by the block inversion routines.

    ``which`` is ``"A"`` when the leading corner is singular and
    ``"schur"`` when the Schur complement is.
    """

    def __init__(self, which: str, message: str):
        super().__init__(message)
        self.which = which


class ContractionRegimeError(MomentProblemError, ValueError):
    """|zeta| * ||K|| >= 1: resolvent outside the guaranteed regime."""


class ParameterError(MomentProblemError, ValueError):
    """Schur parameter has the wrong shape or is not a contraction/unitary."""


class NonPSDIncrementError(ComputationError):
    def __init__(self, interval: tuple[float, float], eigenvalue: float):
        super().__init__(
            f"distribution increment on [{interval[0]:.6g}, {interval[1]:.6g}] "
            f"has eigenvalue {eigenvalue:.3g}"
        )
        self.interval = interval
        self.eigenvalue = eigenvalue
