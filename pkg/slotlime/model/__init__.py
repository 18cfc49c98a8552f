from slotlime.model.cluster import (
    Allocation,
    ClusterParams,
    MetricsReport,
    StateVector,
    validate,
)
from slotlime.model.errors import (
    CapacityExceededError,
    DimensionMismatchError,
    EmptyBufferError,
    InvalidGridError,
    NegativeBufferLengthError,
    NoAdmittedJobsError,
    NonPositiveRateError,
    NotTwoServersError,
    PreconditionError,
    SchedulerNotPSError,
    SingularSystemError,
    SlotlimeError,
    StateOutOfRangeError,
    ValidationError,
)
from slotlime.model.lattice import StateLattice, state_lattice
