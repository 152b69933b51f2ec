"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ToolkitError):
    """An argument lies outside the domain of the requested function."""


class ZeroFunction(ToolkitError):
    """The operation is undefined for the identically-zero function."""


class UnsupportedFamily(ToolkitError):
    """The shape family cannot support the requested evaluation."""


class NotInvertible(ToolkitError):
    """Monotone inversion failed: the function is flat or the target is out of range."""


class EmptyInput(ToolkitError):
    """A non-empty collection was required."""


class NegativePiece(ToolkitError):
    """A non-negative function was required."""


class TooManyLayers(ToolkitError):
    """The exhaustive search is capped; use a cheaper strategy instead."""


class IllegalSpec(ToolkitError):
    """A parameter object violates its validity constraints."""


class SpecParseError(ToolkitError):
    """A JSON specification could not be parsed into a valid object."""


class NonPositiveValue(ToolkitError):
    """A strictly positive sample was required."""
