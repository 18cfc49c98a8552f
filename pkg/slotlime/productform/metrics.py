from __future__ import annotations

import math
from typing import Optional, Tuple, Union

import numpy as np
from loguru import logger

from slotlime.model.cluster import (
    Allocation,
    ClusterParams,
    MetricsReport,
    StateVector,
    validate,
)
from slotlime.model.errors import EmptyBufferError, NoAdmittedJobsError
from slotlime.model.lattice import state_lattice
from slotlime.productform.normalization import NormTable, log_weights, norm_const


def _table(params: ClusterParams, alloc: Allocation, table: Optional[NormTable]) -> NormTable:
    if table is None:
        return norm_const(params, alloc)
    validate(params, alloc)
    return table


def _admitted_fraction(log_g: float) -> float:
    # 1 - 1/G without cancellation
    return -math.expm1(-log_g)


def stationary_prob(
    params: ClusterParams,
    alloc: Allocation,
    x: Union[StateVector, Tuple[int, ...]],
    table: Optional[NormTable] = None,
) -> float:
    """pi(x) = multinomial(x) prod (mu_i/lambda)^x_i / G(ell).

    Raises:
        StateOutOfRangeError: if x is not within ``0 <= x <= ell``
    """
    x = x if isinstance(x, StateVector) else StateVector(tuple(x))
    x.check(alloc)
    table = _table(params, alloc, table)
    return float(np.exp(log_weights(params, np.asarray(x.x))[0] - table.log_g(alloc)))


def stationary_distribution(
    params: ClusterParams, alloc: Allocation, table: Optional[NormTable] = None
) -> np.ndarray:
    """pi over every state ``x <= ell``, in lattice order."""
    table = _table(params, alloc, table)
    states = table.lattice.states
    if table.lattice.bounds != tuple(alloc.ell):
        states = state_lattice(alloc).states
    return np.exp(log_weights(params, states) - table.log_g(alloc))


def loss_probability(
    params: ClusterParams, alloc: Allocation, table: Optional[NormTable] = None
) -> float:
    return float(math.exp(-_table(params, alloc, table).log_g(alloc)))


def occupation_rate(
    params: ClusterParams, alloc: Allocation, i: int, table: Optional[NormTable] = None
) -> float:
    """rho_i = G(ell - e_i) / G(ell).

    Raises:
        EmptyBufferError: if server ``i`` has no slot (its occupation is 0 by convention)
    """
    table = _table(params, alloc, table)
    if alloc[i] == 0:
        raise EmptyBufferError(f"server {i} has no slot")
    below = list(alloc.ell)
    below[i] -= 1
    return float(math.exp(table.log_g(below) - table.log_g(alloc)))


def mean_queue_lengths(
    params: ClusterParams, alloc: Allocation, table: Optional[NormTable] = None
) -> Tuple[float, ...]:
    """alpha_i = sum_{m < ell_i} G(ell with ell_i = m) / G(ell), for every server."""
    table = _table(params, alloc, table)
    index = table.lattice.index(alloc.ell)
    log_s = table.log_partial_sums[index]
    return tuple(float(v) for v in np.exp(log_s - table.log_values[index]))


def mean_response_time(
    params: ClusterParams, alloc: Allocation, table: Optional[NormTable] = None
) -> float:
    """Little's law: sum(alpha) / (lambda * (1 - beta)).

    Raises:
        NoAdmittedJobsError: if the allocation has no slot at all
    """
    table = _table(params, alloc, table)
    if alloc.total == 0:
        raise NoAdmittedJobsError("no slot is allocated, no job is ever admitted")
    alpha = mean_queue_lengths(params, alloc, table)
    return math.fsum(alpha) / (params.lam * _admitted_fraction(table.log_g(alloc)))


def analyze(
    params: ClusterParams, alloc: Allocation, table: Optional[NormTable] = None
) -> MetricsReport:
    """Every metric of one instance from a single normalization table."""
    table = _table(params, alloc, table)
    log_g = table.log_g(alloc)

    empty = tuple(i for i, e in enumerate(alloc.ell) if e == 0)
    if empty:
        logger.warning(f"servers {list(empty)} have no slot, their occupation is 0")
    occupation = tuple(
        0.0 if alloc[i] == 0 else occupation_rate(params, alloc, i, table)
        for i in range(len(alloc))
    )

    if alloc.total == 0:
        response = None
    else:
        response = mean_response_time(params, alloc, table)

    return MetricsReport(
        loss=math.exp(-log_g),
        occupation=occupation,
        mean_jobs=mean_queue_lengths(params, alloc, table),
        mean_response_time=response,
        norm_const_log=log_g,
        throughput=params.lam * _admitted_fraction(log_g),
        empty_servers=empty,
    )
