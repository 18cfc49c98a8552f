from slotlime.simulator.config import Scheduler, ServiceDistribution, ServiceKind, SimConfig
from slotlime.simulator.engine import ReplicationTally, replication_streams, run_replication
from slotlime.simulator.estimates import (
    InsensitivityReport,
    MetricCheck,
    SimEstimate,
    compare_metric,
    confidence_interval,
    covers,
    estimate_metrics,
    insensitivity_test,
)
