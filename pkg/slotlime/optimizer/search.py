from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from scipy.special import logsumexp

from slotlime.model.cluster import Allocation, ClusterParams
from slotlime.model.errors import CapacityExceededError
from slotlime.optimizer.models import Metric, OptimizationQuery, OptimizationResult
from slotlime.productform.normalization import NormTable, log_weights, simplex_table

# states this many nats below every allocation's largest excluded weight are dropped
EXCLUDED_MASS_MARGIN = 60.0
CHUNK_ELEMENTS = 1 << 24


def log_metric_values(
    table: NormTable, total_slots: int, metric: Metric
) -> Tuple[np.ndarray, np.ndarray]:
    """Compositions of ``total_slots`` (lexicographic) and the log of the metric at each.

    The table must cover the simplex ``sum(k) <= total_slots``.
    """
    group = table.lattice.level_groups[total_slots]
    compositions = table.lattice.states[group]
    log_g = table.log_values[group]

    if metric == Metric.LOSS:
        return compositions, -log_g

    # log of sum(alpha) / (lambda (1 - 1/G))
    log_jobs = logsumexp(table.log_partial_sums[group], axis=1) - log_g
    log_admitted = np.log(-np.expm1(-log_g))
    return compositions, log_jobs - math.log(table.params.lam) - log_admitted


def log_excluded_mass(
    params: ClusterParams, total_slots: int, allocations: np.ndarray, states: np.ndarray
) -> np.ndarray:
    """log of the product-form mass of ``{x : sum(x) <= L}`` left outside each box
    ``x <= ell``, for compositions ``ell`` of L.

    G(ell) is that simplex mass minus the excluded one, so comparing excluded masses
    compares G exactly even when G is within rounding of its neighbours. ``states``
    must enumerate the simplex.
    """
    allocations = np.asarray(allocations, dtype=np.int64).reshape(-1, params.n_servers)
    states = np.asarray(states, dtype=np.int64)
    states = states[states.sum(axis=1) <= total_slots]
    weights = log_weights(params, states)

    # (l_i + 1) e_i is excluded and lies in the simplex whenever l_i < L
    single = np.where(
        allocations < total_slots, (allocations + 1) * params.log_ratios[None, :], -np.inf
    )
    floor = float(single.max(axis=1).min()) - EXCLUDED_MASS_MARGIN
    keep = weights >= floor
    states, weights = states[keep], weights[keep]

    out = np.empty(len(allocations))
    step = max(1, CHUNK_ELEMENTS // max(1, states.size))
    for start in range(0, len(allocations), step):
        block = allocations[start : start + step]
        outside = (states[None, :, :] > block[:, None, :]).any(axis=2)
        out[start : start + step] = logsumexp(
            np.where(outside, weights[None, :], -np.inf), axis=1
        )
    return out


def _exact_loss_ties(
    table: NormTable, q: OptimizationQuery, compositions: np.ndarray, band: np.ndarray
) -> np.ndarray:
    log_g = table.log_values[table.lattice.level_groups[q.total_slots]][band]
    excluded = log_excluded_mass(
        table.params, q.total_slots, compositions[band], table.lattice.states
    )
    if excluded.max() > log_g.min():
        # the excluded mass is the larger quantity, G itself resolves better
        return band
    tied = band[excluded <= excluded.min() + q.tie_tolerance]
    logger.debug(
        f"lambda={table.params.lam}: {len(band)} loss values within rounding, "
        f"{len(tied)} left after comparing excluded mass"
    )
    return tied


def optimal_allocation(
    q: OptimizationQuery, table: Optional[NormTable] = None
) -> OptimizationResult:
    """Exhaustive search of the compositions of L minimizing the query metric.

    Every composition within ``tie_tolerance`` (relative) of the best value is a near
    tie. For the loss metric near ties are then ranked by the mass each allocation
    excludes from the simplex, which does not cancel, so ``minimizers`` only keeps the
    compositions tied on that exact comparison. The canonical minimizer is the
    lexicographically smallest.

    Raises:
        CapacityExceededError: if there are more than ``max_compositions`` compositions
    """
    params: ClusterParams = q.params
    count = Allocation.count_compositions(q.total_slots, params.n_servers)
    if count > q.max_compositions:
        raise CapacityExceededError(
            f"{count} compositions of {q.total_slots} slots exceed the search cap "
            f"of {q.max_compositions}"
        )

    if table is None:
        table = simplex_table(params, q.total_slots)
    compositions, log_values = log_metric_values(table, q.total_slots, q.metric)

    best = float(log_values.min())
    # relative tolerance on the metric is an absolute one on its log
    band = np.flatnonzero(log_values <= best + q.tie_tolerance)
    tied = band
    if q.metric == Metric.LOSS and len(band) > 1:
        tied = _exact_loss_ties(table, q, compositions, band)
    minimizers = tuple(Allocation(tuple(compositions[k])) for k in tied)

    if params.n_servers == 2 and q.metric == Metric.LOSS and len(minimizers) > 1:
        logger.warning(
            f"{len(minimizers)} loss minimizers at lambda={params.lam}: "
            f"{[m.ell for m in minimizers]}"
        )
    logger.debug(
        f"lambda={params.lam} {q.metric.value}: canonical {minimizers[0].ell} "
        f"of {len(compositions)} compositions"
    )
    return OptimizationResult(
        params=params,
        metric=q.metric,
        total_slots=q.total_slots,
        minimizers=minimizers,
        best_value=math.exp(best),
        compositions=compositions,
        values=np.exp(log_values),
        near_ties=len(band),
    )
