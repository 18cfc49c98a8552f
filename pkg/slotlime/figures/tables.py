from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from loguru import logger

from slotlime.model.cluster import Allocation, ClusterParams
from slotlime.optimizer.models import Metric
from slotlime.optimizer.scans import optimize_grid
from slotlime.productform.metrics import loss_probability, mean_response_time
from slotlime.productform.normalization import simplex_table
from slotlime.tools.progress import slotlime_track

TWO_SERVER_SLOTS = 20
FOUR_SERVER_SLOTS = 40
FOUR_SERVER_RATES = (0.45, 0.3, 0.2, 0.05)
FAST_SHARES = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95)
LOW_TRAFFIC_LAMBDA = 1e-4


@dataclass(frozen=True)
class FigureTable:
    name: str
    header: Tuple[str, ...]
    rows: List[Tuple]


def _label(value: float) -> str:
    return format(value, ".12g")


def uniform_grid(lambda_max: float, points: int) -> List[float]:
    """lambda_max * k / points for k = 1..points."""
    return [lambda_max * k / points for k in range(1, points + 1)]


def loss_profile(
    total_slots: Optional[int] = None,
    lambda_max: Optional[float] = None,
    points: Optional[int] = None,
    workers: int = 0,
    progress: bool = False,
) -> FigureTable:
    """Loss probability against the slots of the fast server, mu = (0.9, 0.1)."""
    total = total_slots or TWO_SERVER_SLOTS
    lambdas = uniform_grid(lambda_max or 2.0, points or 8)
    columns = []
    for lam in slotlime_track(lambdas, description="figure 3", disable=not progress):
        params = ClusterParams(lam=lam, mu=(0.9, 0.1))
        table = simplex_table(params, total)
        columns.append(
            [
                loss_probability(params, Allocation((l1, total - l1)), table)
                for l1 in range(total + 1)
            ]
        )
    header = ("l1",) + tuple(f"lambda={_label(lam)}" for lam in lambdas)
    rows = [(l1, *(col[l1] for col in columns)) for l1 in range(total + 1)]
    return FigureTable("figure3", header, rows)


def _fast_share_optimum(
    metric: Metric,
    name: str,
    total_slots: Optional[int],
    lambda_max: Optional[float],
    points: Optional[int],
    workers: int,
    progress: bool,
) -> FigureTable:
    total = total_slots or TWO_SERVER_SLOTS
    lambdas = [LOW_TRAFFIC_LAMBDA] + uniform_grid(lambda_max or 5.0, points or 100)
    columns = []
    for mu1 in FAST_SHARES:
        results = optimize_grid(
            (mu1, round(1.0 - mu1, 12)), total, lambdas, metric, workers=workers, progress=progress
        )
        columns.append([r.canonical[0] for r in results])
    header = ("lambda",) + tuple(f"mu1={_label(m)}" for m in FAST_SHARES)
    rows = [(lam, *(col[k] for col in columns)) for k, lam in enumerate(lambdas)]
    return FigureTable(name, header, rows)


def optimal_fast_buffer_loss(
    total_slots=None, lambda_max=None, points=None, workers=0, progress=False
) -> FigureTable:
    """Loss-optimal buffer of the fast server against lambda, for each mu1."""
    return _fast_share_optimum(
        Metric.LOSS, "figure4", total_slots, lambda_max, points, workers, progress
    )


def response_profile(
    total_slots: Optional[int] = None,
    lambda_max: Optional[float] = None,
    points: Optional[int] = None,
    workers: int = 0,
    progress: bool = False,
) -> FigureTable:
    """Mean response time against lambda for every split of the slots, mu = (0.75, 0.25)."""
    total = total_slots or TWO_SERVER_SLOTS
    lambdas = uniform_grid(lambda_max or 4.0, points or 200)
    rows = []
    for lam in slotlime_track(lambdas, description="figure 5", disable=not progress):
        params = ClusterParams(lam=lam, mu=(0.75, 0.25))
        table = simplex_table(params, total)
        rows.append(
            (lam, *(mean_response_time(params, Allocation((l1, total - l1)), table)
                    for l1 in range(total + 1)))
        )
    header = ("lambda",) + tuple(f"l1={l1}" for l1 in range(total + 1))
    return FigureTable("figure5", header, rows)


def optimal_fast_buffer_response(
    total_slots=None, lambda_max=None, points=None, workers=0, progress=False
) -> FigureTable:
    """Response-time-optimal buffer of the fast server against lambda, for each mu1."""
    return _fast_share_optimum(
        Metric.RESPONSE_TIME, "figure6", total_slots, lambda_max, points, workers, progress
    )


def _four_server_optimum(
    metric: Metric,
    name: str,
    total_slots: Optional[int],
    lambda_max: Optional[float],
    points: Optional[int],
    workers: int,
    progress: bool,
    rates: Sequence[float] = FOUR_SERVER_RATES,
) -> FigureTable:
    total = total_slots or FOUR_SERVER_SLOTS
    lambdas = uniform_grid(lambda_max or 7.0, points or 70)
    results = optimize_grid(rates, total, lambdas, metric, workers=workers, progress=progress)
    header = ("lambda",) + tuple(f"l{i + 1}" for i in range(len(rates)))
    rows = [(r.params.lam, *r.user_canonical()) for r in results]
    return FigureTable(name, header, rows)


def four_server_loss(
    total_slots=None, lambda_max=None, points=None, workers=0, progress=False
) -> FigureTable:
    return _four_server_optimum(
        Metric.LOSS, "figure7", total_slots, lambda_max, points, workers, progress
    )


def four_server_response(
    total_slots=None, lambda_max=None, points=None, workers=0, progress=False
) -> FigureTable:
    return _four_server_optimum(
        Metric.RESPONSE_TIME, "figure8", total_slots, lambda_max, points, workers, progress
    )


FIGURE_BUILDERS: Dict[int, Callable[..., FigureTable]] = {
    3: loss_profile,
    4: optimal_fast_buffer_loss,
    5: response_profile,
    6: optimal_fast_buffer_response,
    7: four_server_loss,
    8: four_server_response,
}


def build_figure(figure_id: int, **kwargs) -> FigureTable:
    """Raises KeyError for an unknown figure id."""
    table = FIGURE_BUILDERS[figure_id](**kwargs)
    logger.info(f"{table.name}: {len(table.rows)} rows")
    return table
