"""Exception hierarchy; the CLI maps these onto exit codes."""


class RecdivError(Exception):
    """Base class for all errors raised by the library."""


class DomainError(RecdivError, ValueError):
    """Input outside the mathematical domain of an operation."""


class PreconditionError(DomainError):
    """A documented precondition does not hold."""


class RegimeError(DomainError):
    """Asymptotic parameter choices are unreachable at the requested scale."""


class ResourceError(RecdivError, RuntimeError):
    """A bounded search exhausted its budget."""


class VanishesIdentically(DomainError):
    """A polynomial is identically zero modulo the given prime."""
