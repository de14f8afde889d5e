"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A constructor or operation received an out-of-domain parameter."""


class PreconditionError(ValueError):
    """A closed-form expression was applied outside its validity domain.

    The message names the violated condition and, where applicable, the
    offending index.
    """


class InfeasibleAllocationError(ValueError):
    """An allocation assigns some agent an action outside its action set."""


class SizeCapError(RuntimeError):
    """Exhaustive enumeration would exceed the configured cap."""


class DegenerateInstanceError(ValueError):
    """The instance admits no allocation with positive welfare."""


class InternalSolverError(RuntimeError):
    """The LP solver returned an unexpected status for a well-posed input."""
