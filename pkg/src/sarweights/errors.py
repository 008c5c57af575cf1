"""Exception hierarchy shared across the package."""


class SarweightsError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(SarweightsError):
    """A configuration or input value violates its documented constraints.

    ``field`` names the offending entry so CLI error reports can point at it.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SingularMatrixError(SarweightsError):
    """Determinant is non-positive or numerically zero."""


class NonPositiveDeterminantError(SarweightsError):
    """A rank-one edit would drive the determinant to zero or below."""


class InconsistentStateError(SarweightsError):
    """A cached factorization does not match the parameters it claims to represent."""


class RankDeficientError(SarweightsError):
    """Design matrix is collinear."""


class NumericalFailureError(SarweightsError):
    """A numerical routine failed (non-PD covariance, pathological chain, ...)."""


class DegeneratePosteriorError(SarweightsError):
    """Every grid point of a conditional posterior has zero density."""


class OutOfSupportError(SarweightsError):
    """A parameter value lies outside the support of its prior."""


class InvalidAnchorError(SarweightsError):
    """Expected-neighbour anchor is outside (0, n-1)."""


class DimensionMismatchError(SarweightsError):
    """Array arguments disagree on their shared dimension."""


class EmptyChainError(SarweightsError):
    """Operation requires at least one retained draw."""


class TooFewDrawsError(SarweightsError):
    """Diagnostic needs a longer chain than was supplied."""


class UnbalancedPanelError(SarweightsError):
    """Panel file is not one row per (unit, time) over a full grid."""


class MissingLagError(SarweightsError):
    """Requested temporal lag exceeds the panel's time range."""


class PanelParseError(SarweightsError):
    """Malformed panel CSV; carries the offending location."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
