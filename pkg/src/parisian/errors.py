"""Exception hierarchy shared by the library and the CLI."""


class ParisianError(Exception):
    """Base class for all library errors."""


class DomainError(ParisianError, ValueError):
    """Parameters outside the domain where a quantity is defined."""


class NoRootError(DomainError):
    """The Cramér equation has no positive root (heavy tail or non-positive drift)."""


class CramerConditionError(DomainError):
    """The derivative condition at the Cramér root is violated."""


class DivergenceError(DomainError):
    """An exponential moment or series does not converge."""


class ResourceLimitError(ParisianError):
    """A table or enumeration would exceed its configured size cap."""
