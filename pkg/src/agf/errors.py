"""Exception hierarchy shared by all agf modules."""


class AgfError(Exception):
    """Base class for all agf errors."""


class ValidationError(AgfError, ValueError):
    """Input data violates a structural invariant (negative value, NaN, ...)."""


class ParameterError(AgfError, ValueError):
    """A numeric parameter is outside its admissible range."""


class PreconditionError(AgfError, ValueError):
    """An operation was called on an object that does not satisfy its precondition."""


class ResourceError(AgfError, RuntimeError):
    """A size guard was exceeded (quadratic-cost operations are quarantined)."""
