from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

from loguru import logger

from slotlime.model.cluster import Allocation, ClusterParams
from slotlime.model.errors import InvalidGridError, PreconditionError
from slotlime.optimizer.models import (
    DEFAULT_TIE_TOLERANCE,
    Metric,
    OptimizationQuery,
    OptimizationResult,
)
from slotlime.optimizer.search import optimal_allocation
from slotlime.tools.parallel import ordered_map


@dataclass(frozen=True)
class ScanRow:
    lam: float
    allocation: Allocation
    best_value: float
    ties: int


@dataclass(frozen=True)
class MonotonicityViolation:
    """Buffer length of ``server`` moved the wrong way between two grid points."""

    server: int
    expected: str
    lam_prev: float
    lam_next: float
    length_prev: int
    length_next: int


@dataclass(frozen=True)
class ScanReport:
    params: ClusterParams
    total_slots: int
    metric: Metric
    rows: Tuple[ScanRow, ...]
    violations: Tuple[MonotonicityViolation, ...]
    asserted: bool

    @property
    def passed(self) -> bool:
        return not self.asserted or not self.violations

    def user_rows(self) -> List[Tuple[float, List[int], float, int]]:
        return [
            (r.lam, self.params.to_user_order(list(r.allocation.ell)), r.best_value, r.ties)
            for r in self.rows
        ]


@dataclass(frozen=True)
class ConjectureFailure:
    n: int
    lam_prev: float
    lam_next: float


@dataclass(frozen=True)
class ConjectureReport:
    rows: Tuple[ScanRow, ...]
    prefixes: Dict[int, bool] = field(default_factory=dict)
    failures: Tuple[ConjectureFailure, ...] = ()
    monotonicity: Tuple[MonotonicityViolation, ...] = ()

    @property
    def passed(self) -> bool:
        return all(self.prefixes.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "prefixes": {str(n): ok for n, ok in self.prefixes.items()},
            "failures": [
                {"n": f.n, "lambda_prev": f.lam_prev, "lambda_next": f.lam_next}
                for f in self.failures
            ],
        }


def check_grid(lambda_grid: Sequence[float], min_points: int = 2) -> List[float]:
    """Raises InvalidGridError unless the grid is positive and strictly increasing."""
    grid = [float(v) for v in lambda_grid]
    if len(grid) < min_points:
        raise InvalidGridError(f"at least {min_points} grid points are needed, got {len(grid)}")
    if any(v <= 0 for v in grid):
        raise InvalidGridError("arrival rates must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidGridError("the arrival rate grid must be strictly increasing")
    return grid


def _optimize_point(query: OptimizationQuery) -> OptimizationResult:
    return optimal_allocation(query)


def optimize_grid(
    mu: Sequence[float],
    total_slots: int,
    lambda_grid: Sequence[float],
    metric: Metric = Metric.LOSS,
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE,
    workers: int = 0,
    progress: bool = False,
) -> List[OptimizationResult]:
    """Optimal allocation at every arrival rate of the grid, in grid order."""
    queries = [
        OptimizationQuery(
            lam=lam,
            mu=tuple(mu),
            total_slots=total_slots,
            metric=metric,
            tie_tolerance=tie_tolerance,
        )
        for lam in lambda_grid
    ]
    return ordered_map(
        _optimize_point, queries, workers=workers, progress=progress, description="optimizing"
    )


def _direction_violations(
    rows: Sequence[ScanRow], server: int, expected: str
) -> List[MonotonicityViolation]:
    out = []
    for prev, nxt in zip(rows, rows[1:]):
        a, b = prev.allocation[server], nxt.allocation[server]
        if (expected == "non-increasing" and b > a) or (expected == "non-decreasing" and b < a):
            out.append(MonotonicityViolation(server, expected, prev.lam, nxt.lam, a, b))
    return out


def monotonicity_scan(
    mu: Sequence[float],
    total_slots: int,
    lambda_grid: Sequence[float],
    metric: Metric = Metric.LOSS,
    workers: int = 0,
    progress: bool = False,
) -> ScanReport:
    """Canonical optimal allocation along an increasing arrival rate grid.

    The buffer of the fastest server must be non-increasing in lambda and, with more
    than two servers, the one of the slowest non-decreasing. For the mean response
    time the same directions are recorded but not asserted.

    Raises:
        InvalidGridError: if the grid has fewer than two points or is not increasing
    """
    grid = check_grid(lambda_grid)
    results = optimize_grid(mu, total_slots, grid, metric, workers=workers, progress=progress)
    rows = tuple(ScanRow(r.params.lam, r.canonical, r.best_value, r.ties) for r in results)

    n = len(mu)
    violations = _direction_violations(rows, 0, "non-increasing")
    if n > 2:
        violations += _direction_violations(rows, n - 1, "non-decreasing")

    asserted = metric == Metric.LOSS
    if violations:
        log = logger.error if asserted else logger.info
        log(f"{len(violations)} monotonicity violations in the {metric.value} scan")
    logger.info(f"scan of {len(grid)} arrival rates done, L={total_slots}")
    return ScanReport(
        params=results[0].params,
        total_slots=total_slots,
        metric=metric,
        rows=rows,
        violations=tuple(violations),
        asserted=asserted,
    )


def conjecture_scan(
    mu: Sequence[float],
    total_slots: int,
    lambda_grid: Sequence[float],
    workers: int = 0,
    progress: bool = False,
) -> ConjectureReport:
    """Checks that the loss-optimal number of slots of the n fastest servers is
    non-increasing in lambda, for every n < N. Failures are reported, not raised.

    Raises:
        PreconditionError: with fewer than three servers
    """
    if len(mu) < 3:
        raise PreconditionError("the prefix sum check needs at least three servers")
    scan = monotonicity_scan(
        mu, total_slots, lambda_grid, Metric.LOSS, workers=workers, progress=progress
    )

    prefixes: Dict[int, bool] = {}
    failures: List[ConjectureFailure] = []
    for n in range(1, len(mu)):
        sums = [sum(row.allocation.ell[:n]) for row in scan.rows]
        bad = [
            ConjectureFailure(n, scan.rows[k].lam, scan.rows[k + 1].lam)
            for k in range(len(sums) - 1)
            if sums[k + 1] > sums[k]
        ]
        prefixes[n] = not bad
        failures.extend(bad)
    if failures:
        logger.warning(f"prefix sums increased {len(failures)} times")
    return ConjectureReport(
        rows=scan.rows,
        prefixes=prefixes,
        failures=tuple(failures),
        monotonicity=scan.violations,
    )
