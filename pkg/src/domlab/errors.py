"""Exception types shared across the package."""


class DomLabError(Exception):
    """Base class for all errors raised by domlab."""


class ShapeMismatchError(DomLabError):
    """Vector or matrix does not conform to the declared block structure."""


class NotRealError(DomLabError):
    """An operation requiring a real (J-fixed) vector received one that is not."""


class NotPositiveError(DomLabError):
    """An operation requiring a cone element received one outside the cone."""


class HypothesisError(DomLabError):
    """A criterion's standing hypothesis (realness, positivity, ...) fails."""


class CommutativityError(DomLabError):
    """An exact commutative oracle was invoked on a non-commutative space."""
