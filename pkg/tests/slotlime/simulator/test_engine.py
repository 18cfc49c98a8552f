import math

import numpy as np
import pytest

from slotlime.model import ClusterParams, SchedulerNotPSError
from slotlime.productform import analyze
from slotlime.simulator import (
    Scheduler,
    ServiceDistribution,
    SimConfig,
    compare_metric,
    confidence_interval,
    covers,
    estimate_metrics,
    insensitivity_test,
    replication_streams,
    run_replication,
)


def _close(interval, value, slack=1e-3):
    mean, half = interval
    return abs(mean - value) <= 4 * half + slack


class TestStreams:
    def test_replications_are_reproducible(self):
        cfg = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(1, 1), seed=11)
        first = [g.random(3) for g in replication_streams(cfg, 2)]
        second = [g.random(3) for g in replication_streams(cfg, 2)]
        other = [g.random(3) for g in replication_streams(cfg, 3)]
        assert len(first) == 3
        assert all(np.array_equal(a, b) for a, b in zip(first, second))
        assert not np.array_equal(first[0], other[0])
        assert not np.array_equal(first[0], first[1])


class TestReplication:
    def test_deterministic(self):
        cfg = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(2, 1), arrivals=5000, seed=3)
        assert run_replication(cfg, 0) == run_replication(cfg, 0)
        assert run_replication(cfg, 0) != run_replication(cfg, 1)

    def test_counters(self):
        cfg = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(2, 1), arrivals=10_000, seed=5)
        tally = run_replication(cfg, 0)
        assert tally.arrivals == cfg.arrivals - cfg.warmup_arrivals
        assert tally.admitted + tally.rejected == tally.arrivals
        assert tally.completed <= tally.admitted + sum(cfg.ell)
        assert all(0.0 <= b <= 1.0 for b in tally.busy)
        assert all(0.0 <= n <= e for n, e in zip(tally.mean_jobs, cfg.allocation.ell))

    def test_single_slot_loss(self):
        cfg = SimConfig(lam=0.6, mu=(0.6, 0.4), ell=(1, 0), arrivals=200_000, seed=1)
        tally = run_replication(cfg, 0)
        assert tally.loss == pytest.approx(0.5, abs=0.01)
        assert tally.busy[1] == 0.0
        assert tally.mean_response_time == pytest.approx(1 / 0.6, rel=0.03)

    def test_no_slots(self):
        cfg = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(0, 0), arrivals=1000)
        tally = run_replication(cfg, 0)
        assert tally.loss == 1.0
        assert tally.admitted == 0
        assert math.isnan(tally.mean_response_time)

    def test_time_cap(self):
        cfg = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(1, 1), arrivals=10**9, max_time=500.0)
        cfg = cfg.copy(update={"warmup_fraction": 0.0})
        tally = run_replication(cfg, 0)
        assert tally.duration <= 500.0
        assert 300 < tally.arrivals < 700

    @pytest.mark.parametrize("scheduler", [Scheduler.PS, Scheduler.FCFS])
    def test_little_and_pasta(self, scheduler):
        cfg = SimConfig(
            lam=1.2, mu=(0.5, 0.3, 0.2), ell=(3, 2, 2), arrivals=100_000, scheduler=scheduler
        )
        tally = run_replication(cfg, 0)
        assert abs(tally.little_gap) < 0.05 * sum(tally.mean_jobs)
        assert abs(tally.pasta_gap) < 0.02


class TestEstimates:
    def test_confidence_interval(self):
        mean, half = confidence_interval([1.0, 2.0, 3.0, math.nan])
        assert mean == 2.0
        assert half == pytest.approx(4.302652729911275 / math.sqrt(3.0))
        assert confidence_interval([4.0]) == (4.0, math.inf)
        assert all(math.isnan(v) for v in confidence_interval([math.nan]))
        assert covers((2.0, 0.5), 2.4)
        assert not covers((2.0, 0.5), 2.6)

    def test_compare_metric(self):
        check = compare_metric("loss", 0.4, {"a": (0.41, 0.02), "b": (0.39, 0.02)})
        assert check.passed
        check = compare_metric("loss", 0.4, {"a": (0.41, 0.02), "b": (0.5, 0.02)})
        assert not check.covered["b"]
        assert not check.pairwise
        assert not check.passed

    def test_workers_do_not_change_results(self):
        cfg = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(2, 2), arrivals=4000, replications=4)
        serial = estimate_metrics(cfg)
        pooled = estimate_metrics(cfg, workers=2)
        assert serial.to_dict() == pooled.to_dict()

    def test_matches_product_form(self, two_server_instance):
        cfg = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(1, 1), arrivals=40_000, replications=10)
        estimate = estimate_metrics(cfg)
        assert _close(estimate.loss, two_server_instance["loss"])
        assert _close(estimate.mean_response_time, two_server_instance["response_time"], 0.01)
        for interval, rho in zip(estimate.occupation, two_server_instance["occupation"]):
            assert _close(interval, rho)

    def test_half_width_shrinks_with_replications(self):
        base = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(1, 1), arrivals=500, replications=100)
        single = estimate_metrics(base)
        double = estimate_metrics(base.copy(update={"replications": 200}))
        # about 1 / sqrt(2), up to the spread of the sample deviations
        assert 0.55 < double.loss[1] / single.loss[1] < 0.9
        assert double.replications == 200

    def test_user_order(self):
        cfg = SimConfig(lam=1.0, mu=(0.2, 0.8), ell=(1, 0), arrivals=2000, replications=2)
        estimate = estimate_metrics(cfg).in_user_order(ClusterParams(lam=1.0, mu=cfg.mu))
        assert estimate.occupation[0][0] > 0.0
        assert estimate.occupation[1] == (0.0, 0.0)


class TestInsensitivity:
    def test_requires_processor_sharing(self):
        cfg = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(1, 1), scheduler=Scheduler.FCFS)
        with pytest.raises(SchedulerNotPSError):
            insensitivity_test(cfg)

    def test_empty_cluster(self):
        cfg = SimConfig(lam=1.0, mu=(0.6, 0.4), ell=(0, 0), arrivals=2000, replications=3)
        report = insensitivity_test(cfg)
        loss = [c for c in report.checks if c.metric == "loss"][0]
        assert all(mean == 1.0 for mean, _ in loss.estimates.values())
        assert all(c.metric != "mean_response_time" for c in report.checks)

    def test_distributions_agree(self):
        cfg = SimConfig(lam=1.0, mu=(0.75, 0.25), ell=(4, 2), arrivals=30_000, replications=8)
        report = insensitivity_test(cfg)
        analytic = analyze(cfg.params, cfg.allocation)
        loss = [c for c in report.checks if c.metric == "loss"][0]
        assert loss.analytic == pytest.approx(analytic.loss)
        assert set(loss.estimates) == {
            "exponential",
            "deterministic",
            ServiceDistribution.hyperexponential_scv(4.0).label,
        }
        for check in report.checks:
            for interval in check.estimates.values():
                assert _close(interval, check.analytic, 0.01)

    @pytest.mark.slow
    def test_fcfs_deterministic_deviates(self):
        cfg = SimConfig(
            lam=1.0,
            mu=(0.75, 0.25),
            ell=(12, 8),
            arrivals=125_000,
            replications=20,
            scheduler=Scheduler.FCFS,
            service=ServiceDistribution.deterministic(),
        )
        estimate = estimate_metrics(cfg, workers=-1)
        analytic = analyze(cfg.params, cfg.allocation).mean_response_time
        assert not covers(estimate.mean_response_time, analytic)
