"""Exception types shared across the package."""


class RoughIsoError(Exception):
    """Base class for all domain errors."""


class ImageNotInCodomain(RoughIsoError):
    """A mapping image value is not a point of the declared codomain."""


class EmptyWindow(RoughIsoError):
    """A sampling window produced an empty point configuration."""


class HorizonTooSmall(RoughIsoError):
    """The supplied horizon cannot certify an exact event answer."""


class PreconditionViolated(RoughIsoError):
    """An operation was called outside its stated precondition."""


class InsufficientGaps(RoughIsoError):
    """A gap sequence is too short for the requested scan."""


class BudgetExceeded(RoughIsoError):
    """An exact search exceeded its configured budget."""


class NotFoundWithinBudget(RoughIsoError):
    """A bounded search finished without finding a witness."""


class DomainMismatch(RoughIsoError):
    """Two mappings do not share a common domain/codomain."""


class StreamExhausted(RoughIsoError):
    """A finite point stream could not supply the points required."""
