from slotlime.productform.deltas import (
    DeltaCoefficients,
    DeltaG,
    delta_g,
    delta_g_coefficients,
    remark_one_tie,
)
from slotlime.productform.metrics import (
    analyze,
    loss_probability,
    mean_queue_lengths,
    mean_response_time,
    occupation_rate,
    stationary_distribution,
    stationary_prob,
)
from slotlime.productform.normalization import (
    NormTable,
    log_weights,
    norm_const,
    norm_const_direct,
    simplex_table,
)
