from slotlime.optimizer.models import Metric, OptimizationQuery, OptimizationResult
from slotlime.optimizer.predictors import (
    heavy_traffic_predictor,
    low_traffic_candidates,
    low_traffic_predictor,
    multinomial_mode,
)
from slotlime.optimizer.propositions import (
    PropositionReport,
    delta_sign_violations,
    loss_shift_violations,
    proposition_checks,
)
from slotlime.optimizer.scans import (
    ConjectureFailure,
    ConjectureReport,
    MonotonicityViolation,
    ScanReport,
    ScanRow,
    check_grid,
    conjecture_scan,
    monotonicity_scan,
    optimize_grid,
)
from slotlime.optimizer.search import optimal_allocation
