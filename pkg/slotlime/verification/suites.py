"""Verification suites: each runs a family of numerical checks and returns a
VerificationReport that the ``verify`` command prints and turns into an exit code."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from slotlime.model.cluster import ClusterParams
from slotlime.model.lattice import StateLattice
from slotlime.optimizer.models import OptimizationQuery
from slotlime.optimizer.predictors import heavy_traffic_predictor, multinomial_mode
from slotlime.optimizer.propositions import RECONSTRUCTION_TOLERANCE, proposition_checks
from slotlime.optimizer.scans import conjecture_scan
from slotlime.optimizer.search import optimal_allocation
from slotlime.oracle import solvers
from slotlime.productform.metrics import analyze, stationary_distribution
from slotlime.simulator.config import Scheduler, ServiceDistribution, SimConfig
from slotlime.simulator.estimates import covers, estimate_metrics, insensitivity_test
from slotlime.tools.parallel import ordered_map
from slotlime.tools.progress import slotlime_track

STATE_TOLERANCE = 1e-9
# far enough into heavy traffic for the loss optimum to be the balanced split
HEAVY_TRAFFIC_LAMBDA = 1e15

DEFAULT_MU1_GRID = tuple(round(0.55 + 0.05 * k, 2) for k in range(9))
DEFAULT_FOUR_SERVERS = (0.45, 0.3, 0.2, 0.05)
Instance = Tuple[float, Tuple[float, ...], Tuple[int, ...]]

DEFAULT_INSENSITIVITY_INSTANCES: Tuple[Instance, ...] = (
    (1.0, (0.6, 0.4), (1, 1)),
    (1.0, (0.75, 0.25), (12, 8)),
    (0.6, (0.6, 0.4), (1, 0)),
    (1.0, DEFAULT_FOUR_SERVERS, (4, 3, 2, 1)),
    (2.0, DEFAULT_FOUR_SERVERS, (3, 3, 2, 2)),
)


@dataclass(frozen=True)
class VerificationReport:
    suite: str
    passed: bool
    checks: int
    failures: Tuple[Dict[str, Any], ...]
    max_error: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": self.checks,
            "failures": list(self.failures),
            "max_error": self.max_error,
            "details": self.details,
        }


def log_grid(low: float, high: float, points: int) -> List[float]:
    return [float(v) for v in np.logspace(math.log10(low), math.log10(high), points)]


def _random_instances(count: int, max_states: int, seed: int) -> List[Instance]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.choice([2, 3, 4]))
        lam = float(rng.choice([0.1, 1.0, 10.0]))
        mu = tuple(float(m) for m in rng.dirichlet(np.ones(n)))
        side = max(1, int(math.floor(max_states ** (1.0 / n))) - 1)
        ell = tuple(int(v) for v in rng.integers(0, side + 1, size=n))
        while StateLattice.count(ell) > max_states:
            ell = tuple(max(0, v - 1) for v in ell)
        out.append((lam, mu, ell))
    return out


def _productform_instance(job: Tuple[float, Tuple[float, ...], Tuple[int, ...], int]):
    lam, mu, ell, max_states = job
    params = ClusterParams(lam=lam, mu=mu)
    alloc = params.allocation(ell)
    exact = stationary_distribution(params, alloc)
    solved = solvers.oracle_distribution(params, alloc, max_states=max_states)
    state_error = float(np.abs(exact - solved).max())

    a, b = analyze(params, alloc), solvers.oracle_metrics(params, alloc, max_states=max_states)
    pairs = [(a.loss, b.loss), *zip(a.occupation, b.occupation), *zip(a.mean_jobs, b.mean_jobs)]
    if a.mean_response_time is not None:
        pairs.append((a.mean_response_time, b.mean_response_time))
    metric_error = max(abs(x - y) / max(1.0, abs(x)) for x, y in pairs)
    return state_error, metric_error


def verify_productform(
    max_states: int = 5000,
    instances: int = 200,
    seed: int = 0,
    workers: int = 0,
    progress: bool = False,
) -> VerificationReport:
    """Product form against the solved chain on random instances, state by state."""
    cases = _random_instances(instances, max_states, seed)
    results = ordered_map(
        _productform_instance,
        [(lam, mu, ell, max_states) for lam, mu, ell in cases],
        workers=workers,
        progress=progress,
        description="product form",
    )
    failures = []
    for (lam, mu, ell), (state_error, metric_error) in zip(cases, results):
        if state_error > STATE_TOLERANCE or metric_error > STATE_TOLERANCE:
            failures.append(
                {
                    "lambda": lam,
                    "mu": list(mu),
                    "ell": list(ell),
                    "state_error": state_error,
                    "metric_error": metric_error,
                }
            )
    max_error = max((r[0] for r in results), default=0.0)
    return VerificationReport(
        suite="productform",
        passed=not failures,
        checks=len(cases),
        failures=tuple(failures),
        max_error=max_error,
        details={
            "max_states": max_states,
            "max_metric_error": max((r[1] for r in results), default=0.0),
        },
    )


def verify_propositions(
    max_total: int = 12,
    mu1_grid: Sequence[float] = DEFAULT_MU1_GRID,
    points: int = 50,
    progress: bool = False,
) -> VerificationReport:
    """Slot shift and delta G sign checks plus the coefficient expansion, for every
    fast-server share of the grid."""
    grid = log_grid(1e-2, 1e2, points)
    failures: List[Dict[str, Any]] = []
    checks, max_error = 0, 0.0
    for mu1 in slotlime_track(mu1_grid, description="propositions", disable=not progress):
        rep = proposition_checks((mu1, 1.0 - mu1), max_total, grid)
        checks += rep.shift_checked + rep.sign_checked + rep.coefficient_checked
        max_error = max(max_error, rep.max_reconstruction_error)
        for kind, items in (
            ("shift", rep.shift_violations),
            ("sign", rep.sign_violations),
            ("pattern", rep.pattern_failures),
        ):
            failures.extend({"mu1": mu1, "kind": kind, **item} for item in items)
        if rep.max_reconstruction_error > RECONSTRUCTION_TOLERANCE:
            failures.append(
                {"mu1": mu1, "kind": "reconstruction", "error": rep.max_reconstruction_error}
            )
    return VerificationReport(
        suite="propositions",
        passed=not failures,
        checks=checks,
        failures=tuple(failures),
        max_error=max_error,
        details={"max_total": max_total, "points": points, "mu1": list(mu1_grid)},
    )


def verify_conjecture(
    mu: Sequence[float] = DEFAULT_FOUR_SERVERS,
    total_slots: int = 40,
    lambda_grid: Optional[Sequence[float]] = None,
    workers: int = 0,
    progress: bool = False,
) -> VerificationReport:
    """Monotonicity of the fastest and slowest buffers and of the prefix sums of the
    loss-optimal allocation along the grid; with the default grid (0.1 to 7) the
    low endpoint is also compared with the multinomial mode and the heavy-traffic split
    with the optimum at ``HEAVY_TRAFFIC_LAMBDA``."""
    default_grid = lambda_grid is None
    if default_grid:
        lambda_grid = [float(v) for v in np.linspace(0.1, 7.0, 50)]
    rep = conjecture_scan(mu, total_slots, lambda_grid, workers=workers, progress=progress)

    failures: List[Dict[str, Any]] = [
        {"kind": "prefix", "n": f.n, "lambda_prev": f.lam_prev, "lambda_next": f.lam_next}
        for f in rep.failures
    ]
    failures += [
        {
            "kind": "monotonicity",
            "server": v.server + 1,
            "expected": v.expected,
            "lambda_prev": v.lam_prev,
            "lambda_next": v.lam_next,
        }
        for v in rep.monotonicity
    ]
    checks = len(rep.prefixes) * (len(rep.rows) - 1) + 2 * (len(rep.rows) - 1)
    if default_grid:
        endpoints = {
            "low": (rep.rows[0].lam, multinomial_mode(mu, total_slots)),
            "high": (HEAVY_TRAFFIC_LAMBDA, heavy_traffic_predictor(mu, total_slots)),
        }
        for end, (lam, predicted) in endpoints.items():
            checks += 1
            query = OptimizationQuery(lam=lam, mu=tuple(mu), total_slots=total_slots)
            found = optimal_allocation(query)
            if predicted not in found.minimizers:
                failures.append(
                    {
                        "kind": f"{end}-traffic endpoint",
                        "lambda": lam,
                        "found": list(found.canonical.ell),
                        "predicted": list(predicted.ell),
                    }
                )
    return VerificationReport(
        suite="conjecture",
        passed=not failures,
        checks=checks,
        failures=tuple(failures),
        details={
            "mu": list(mu),
            "total_slots": total_slots,
            "prefixes": {str(n): ok for n, ok in rep.prefixes.items()},
            "rows": [[r.lam, *r.allocation.ell] for r in rep.rows],
        },
    )


def verify_insensitivity(
    instances: Sequence[Instance] = DEFAULT_INSENSITIVITY_INSTANCES,
    arrivals: int = 125_000,
    replications: int = 20,
    seed: int = 0,
    workers: int = 0,
    progress: bool = False,
) -> VerificationReport:
    """PS simulation under three job size distributions against the analytic metrics,
    plus FCFS with deterministic sizes as a negative control that has to miss the
    analytic mean response time on at least one instance."""
    failures: List[Dict[str, Any]] = []
    checks = 0
    control_hits = 0
    details: Dict[str, Any] = {"instances": []}
    for k, (lam, mu, ell) in enumerate(instances):
        cfg = SimConfig(
            lam=lam,
            mu=tuple(mu),
            ell=tuple(ell),
            arrivals=arrivals,
            replications=replications,
            seed=seed + k,
        )
        report = insensitivity_test(cfg, workers=workers, progress=progress)
        checks += len(report.checks)
        for check in report.checks:
            if not check.passed:
                failures.append({"instance": k, **check.to_dict()})

        control = estimate_metrics(
            cfg.copy(
                update={
                    "scheduler": Scheduler.FCFS,
                    "service": ServiceDistribution.deterministic(),
                }
            ),
            workers=workers,
            progress=progress,
        )
        analytic = analyze(cfg.params, cfg.allocation).mean_response_time
        interval = control.mean_response_time
        missed = analytic is not None and not covers(interval, analytic)
        control_hits += int(missed)
        details["instances"].append(
            {
                "lambda": lam,
                "mu": list(mu),
                "ell": list(ell),
                "passed": report.passed,
                "fcfs_deterministic_response": {"mean": interval[0], "half_width": interval[1]},
                "analytic_response": analytic,
                "control_detected": missed,
            }
        )

    checks += 1
    if control_hits == 0:
        failures.append({"kind": "negative control", "reason": "FCFS matched every instance"})
    details["control_detected"] = control_hits
    return VerificationReport(
        suite="insensitivity",
        passed=not failures,
        checks=checks,
        failures=tuple(failures),
        details=details,
    )


SUITES: Dict[str, Callable[..., VerificationReport]] = {
    "productform": verify_productform,
    "propositions": verify_propositions,
    "conjecture": verify_conjecture,
    "insensitivity": verify_insensitivity,
}


def run_suite(name: str, **kwargs) -> VerificationReport:
    report = SUITES[name](**kwargs)
    if report.passed:
        logger.info(f"{name}: {report.checks} checks passed")
    else:
        logger.error(f"{name}: {len(report.failures)} of {report.checks} checks failed")
    return report
