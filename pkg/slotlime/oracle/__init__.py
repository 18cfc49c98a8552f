from slotlime.oracle.generator import DEFAULT_MAX_STATES, GeneratorMatrix, build_generator
from slotlime.oracle.solvers import (
    DENSE_LIMIT,
    oracle_distribution,
    oracle_metrics,
    residual,
    solve_stationary,
)
