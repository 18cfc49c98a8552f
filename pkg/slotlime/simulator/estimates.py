from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import stats

from slotlime.model.cluster import ClusterParams
from slotlime.model.errors import SchedulerNotPSError
from slotlime.productform.metrics import analyze
from slotlime.simulator.config import Scheduler, ServiceDistribution, SimConfig
from slotlime.simulator.engine import ReplicationTally, run_replication
from slotlime.tools.parallel import ordered_map

Interval = Tuple[float, float]


def confidence_interval(values: Sequence[float], confidence: float = 0.95) -> Interval:
    """(mean, half width) of a t interval over independent replications; NaN values
    (metric undefined in a replication) are dropped."""
    data = np.asarray([v for v in values if not math.isnan(v)], dtype=float)
    if data.size == 0:
        return math.nan, math.nan
    mean = float(data.mean())
    if data.size < 2:
        return mean, math.inf
    quantile = stats.t.ppf(0.5 + confidence / 2.0, data.size - 1)
    return mean, float(quantile * data.std(ddof=1) / math.sqrt(data.size))


def covers(interval: Interval, value: float) -> bool:
    mean, half = interval
    return abs(mean - value) <= half


@dataclass(frozen=True)
class SimEstimate:
    """Replication estimates, servers in non-increasing rate order."""

    loss: Interval
    mean_response_time: Interval
    occupation: Tuple[Interval, ...]
    mean_jobs: Tuple[Interval, ...]
    throughput: Interval
    replications: int
    confidence: float
    tallies: Tuple[ReplicationTally, ...] = ()

    def in_user_order(self, params: ClusterParams) -> SimEstimate:
        return SimEstimate(
            loss=self.loss,
            mean_response_time=self.mean_response_time,
            occupation=tuple(params.to_user_order(self.occupation)),
            mean_jobs=tuple(params.to_user_order(self.mean_jobs)),
            throughput=self.throughput,
            replications=self.replications,
            confidence=self.confidence,
            tallies=self.tallies,
        )

    def to_dict(self) -> Dict[str, Any]:
        def pair(iv: Interval) -> Dict[str, float]:
            return {"mean": iv[0], "half_width": iv[1]}

        return {
            "replications": self.replications,
            "confidence": self.confidence,
            "loss": pair(self.loss),
            "mean_response_time": pair(self.mean_response_time),
            "occupation": [pair(iv) for iv in self.occupation],
            "mean_jobs": [pair(iv) for iv in self.mean_jobs],
            "throughput": pair(self.throughput),
        }


def _replicate(job: Tuple[SimConfig, int]) -> ReplicationTally:
    cfg, index = job
    return run_replication(cfg, index)


def estimate_metrics(cfg: SimConfig, workers: int = 0, progress: bool = False) -> SimEstimate:
    """Runs every replication on its own random streams and aggregates them in
    replication order, so results do not depend on ``workers``."""
    tallies = ordered_map(
        _replicate,
        [(cfg, k) for k in range(cfg.replications)],
        workers=workers,
        progress=progress,
        description="replications",
    )
    level = cfg.confidence
    n = len(cfg.mu)
    estimate = SimEstimate(
        loss=confidence_interval([t.loss for t in tallies], level),
        mean_response_time=confidence_interval([t.mean_response_time for t in tallies], level),
        occupation=tuple(
            confidence_interval([t.busy[i] for t in tallies], level) for i in range(n)
        ),
        mean_jobs=tuple(
            confidence_interval([t.mean_jobs[i] for t in tallies], level) for i in range(n)
        ),
        throughput=confidence_interval([t.throughput for t in tallies], level),
        replications=cfg.replications,
        confidence=level,
        tallies=tuple(tallies),
    )
    logger.debug(f"{cfg.replications} replications: loss {estimate.loss}")
    return estimate


@dataclass(frozen=True)
class MetricCheck:
    metric: str
    analytic: float
    estimates: Dict[str, Interval]
    covered: Dict[str, bool]
    pairwise: bool

    @property
    def passed(self) -> bool:
        return self.pairwise and all(self.covered.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metric": self.metric,
            "analytic": self.analytic,
            "estimates": {k: {"mean": m, "half_width": h} for k, (m, h) in self.estimates.items()},
            "covered": dict(self.covered),
            "pairwise": self.pairwise,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class InsensitivityReport:
    checks: Tuple[MetricCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def compare_metric(metric: str, analytic: float, estimates: Dict[str, Interval]) -> MetricCheck:
    covered = {label: covers(iv, analytic) for label, iv in estimates.items()}
    items = list(estimates.values())
    pairwise = all(
        abs(a[0] - b[0]) < a[1] + b[1] or a[0] == b[0]
        for k, a in enumerate(items)
        for b in items[k + 1 :]
    )
    return MetricCheck(metric, analytic, dict(estimates), covered, pairwise)


def _metric_intervals(est: SimEstimate) -> Dict[str, Interval]:
    out = {"loss": est.loss, "mean_response_time": est.mean_response_time}
    for i, iv in enumerate(est.occupation):
        out[f"occupation_{i + 1}"] = iv
    return out


def insensitivity_test(
    cfg: SimConfig,
    distributions: Optional[List[ServiceDistribution]] = None,
    workers: int = 0,
    progress: bool = False,
) -> InsensitivityReport:
    """Estimates the metrics under several unit-mean job size distributions (default
    exponential, deterministic and hyperexponential with scv 4) and checks that every
    interval covers the analytic value and that the estimates agree pairwise.

    Raises:
        SchedulerNotPSError: if the configuration is not processor sharing
    """
    if cfg.scheduler != Scheduler.PS:
        raise SchedulerNotPSError(f"insensitivity only holds under PS, got {cfg.scheduler.value}")
    if distributions is None:
        distributions = [
            ServiceDistribution.exponential(),
            ServiceDistribution.deterministic(),
            ServiceDistribution.hyperexponential_scv(4.0),
        ]

    params = cfg.params
    report = analyze(params, cfg.allocation)
    reference = {"loss": report.loss, "mean_response_time": report.mean_response_time}
    for i, rho in enumerate(report.occupation):
        reference[f"occupation_{i + 1}"] = rho

    per_dist = {}
    for dist in distributions:
        est = estimate_metrics(cfg.copy(update={"service": dist}), workers, progress)
        per_dist[dist.label] = _metric_intervals(est)

    checks = []
    for metric, analytic in reference.items():
        if analytic is None:
            continue
        checks.append(
            compare_metric(metric, analytic, {label: iv[metric] for label, iv in per_dist.items()})
        )
    result = InsensitivityReport(tuple(checks))
    logger.info(f"insensitivity at ell={cfg.ell}: passed={result.passed}")
    return result
