class SlotlimeError(Exception):
    """Base class of every error raised by slotlime."""


class ValidationError(SlotlimeError):
    """Cluster parameters or allocation violate their invariants."""


class DimensionMismatchError(ValidationError):
    pass


class NonPositiveRateError(ValidationError):
    pass


class NegativeBufferLengthError(ValidationError):
    pass


class CapacityExceededError(SlotlimeError):
    """The requested state space or search space is larger than the configured cap."""


class StateOutOfRangeError(SlotlimeError):
    pass


class EmptyBufferError(SlotlimeError):
    """An operation needs at least one slot at a server that has none."""


class NoAdmittedJobsError(SlotlimeError):
    """The mean response time is undefined when the cluster has no slot at all."""


class NotTwoServersError(SlotlimeError):
    pass


class SingularSystemError(SlotlimeError):
    """The balance equations could not be solved; signals a broken generator."""


class SchedulerNotPSError(SlotlimeError):
    pass


class InvalidGridError(SlotlimeError):
    pass


class PreconditionError(SlotlimeError):
    pass
