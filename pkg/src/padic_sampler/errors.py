"""Exception types shared across the package."""


class PadicError(Exception):
    """Base class for all package-specific errors."""


class PrecisionExhausted(PadicError):
    """Cancellation or truncation consumed every significant digit."""


class ZeroVectorError(PadicError):
    """Operation requires a nonzero vector."""


class RankDeficientError(PadicError):
    """A matrix that must have full rank at working precision does not.

    Callers sampling random slices treat this as a resample event.
    """


class SingularPointError(PadicError):
    """The Jacobian at the point drops rank at working precision."""


class NotOnVarietyError(PadicError):
    """The point does not satisfy the defining equations to tolerance."""


class NotHomogeneousError(PadicError):
    """A projective operation was applied to a non-homogeneous system."""


class DegenerateRootError(PadicError):
    """Root refinement hit its depth cap without separating roots."""


class DegenerateSliceError(PadicError):
    """The slice intersection could not be certified; resample the slice."""


class BoundViolationError(PadicError):
    """A slice produced a weighted sum above the rejection bound M.

    Indicates a wrong degree bound or density maximum; aborts the run.
    """


class NegativeValuationCoefficientError(PadicError):
    """Coefficient with negative valuation where integrality is required."""


class PolySyntaxError(PadicError):
    """Polynomial expression failed to parse; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownVariableError(PadicError):
    """Expression used a variable not declared for the polynomial."""


class SpecFileError(PadicError):
    """A variety or density file failed validation."""
