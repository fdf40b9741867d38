"""Exception types shared across the package."""


class CovertNavError(Exception):
    """Base class for all package-specific errors."""


class OutOfBoundsError(CovertNavError, ValueError):
    """A terrain query or pose fell outside the valid grid domain."""


class InvalidSpecError(CovertNavError, ValueError):
    """A scenario specification violates its invariants."""


class InvalidZoneError(CovertNavError, ValueError):
    """A spawn zone is outside the grid or intersects an object."""


class NoValidGoalError(CovertNavError, RuntimeError):
    """Goal sampling exhausted its retry budget without a free point."""


class EmptyHistoryError(CovertNavError, ValueError):
    """The elevation history required by the elevation reward is empty."""


class DegenerateNormalizerError(CovertNavError, ValueError):
    """Episode reward normalization produced a zero or non-finite denominator."""


class DimensionMismatchError(CovertNavError, ValueError):
    """Array shapes passed to the network or optimizer do not compose."""


class InsufficientSamplesError(CovertNavError, ValueError):
    """The replay buffer holds fewer transitions than the requested batch."""


class InadmissibleCandidateError(CovertNavError, ValueError):
    """A velocity candidate failed the collision-free rollout check."""


class NoAdmissibleVelocityError(CovertNavError, RuntimeError):
    """No candidate in the dynamic window is collision-free."""


class EmptyInputError(CovertNavError, ValueError):
    """An aggregation was asked to summarize zero episodes."""
