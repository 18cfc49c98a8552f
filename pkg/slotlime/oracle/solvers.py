from __future__ import annotations

import math
from typing import Optional

import numpy as np
import scipy.linalg
from loguru import logger
from scipy import sparse

from slotlime.model.cluster import Allocation, ClusterParams, MetricsReport
from slotlime.model.errors import SingularSystemError
from slotlime.oracle.generator import GeneratorMatrix, build_generator

DENSE_LIMIT = 2000
UNIFORMIZATION_FACTOR = 1.01
RESIDUAL_TOLERANCE = 1e-12


def residual(gen: GeneratorMatrix, pi: np.ndarray) -> float:
    """Infinity norm of pi Q."""
    return float(np.abs(gen.full().T @ pi).max())


def _solve_dense(gen: GeneratorMatrix) -> np.ndarray:
    # balance equations Q^T pi = 0 with the last one replaced by sum(pi) = 1
    a = gen.full().T.toarray()
    a[-1, :] = 1.0
    b = np.zeros(gen.dim)
    b[-1] = 1.0
    try:
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
        pi = scipy.linalg.lu_solve((lu, piv), b)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(f"dense balance solve failed: {exc}") from exc
    if not np.all(np.isfinite(pi)):
        raise SingularSystemError("dense balance solve returned non-finite values")
    return pi


def _solve_power(gen: GeneratorMatrix, tolerance: float, max_iterations: int) -> np.ndarray:
    scale = UNIFORMIZATION_FACTOR * float(gen.outflow.max())
    if scale <= 0.0:
        return np.ones(1)
    transition = (sparse.identity(gen.dim, format="csr") + gen.full() / scale).T.tocsr()
    q_t = gen.full().T.tocsr()

    pi = np.full(gen.dim, 1.0 / gen.dim)
    for it in range(max_iterations):
        pi = transition @ pi
        pi /= pi.sum()
        if it % 50 == 0 and np.abs(q_t @ pi).max() <= tolerance * scale:
            logger.debug(f"power iteration converged after {it + 1} steps")
            return pi
    raise SingularSystemError(
        f"power iteration did not reach residual {tolerance} in {max_iterations} steps"
    )


def solve_stationary(
    gen: GeneratorMatrix,
    method: str = "auto",
    tolerance: float = RESIDUAL_TOLERANCE,
    max_iterations: int = 1_000_000,
) -> np.ndarray:
    """Stationary vector of the generator, in lattice order.

    ``method`` is ``dense`` (replaced-row LU), ``power`` (uniformized power
    iteration) or ``auto`` (dense up to ``DENSE_LIMIT`` states).

    Raises:
        SingularSystemError: if the system cannot be solved or the solution leaves a
            residual above ``tolerance`` times the largest outflow rate
    """
    if method == "auto":
        method = "dense" if gen.dim <= DENSE_LIMIT else "power"
    if method == "dense":
        pi = _solve_dense(gen)
    elif method == "power":
        pi = _solve_power(gen, tolerance, max_iterations)
    else:
        raise ValueError(f"unknown solver {method!r}")

    scale = UNIFORMIZATION_FACTOR * float(gen.outflow.max())
    res = residual(gen, pi)
    if res > tolerance * scale:
        raise SingularSystemError(
            f"{method} solve left residual {res:.3g}, above {tolerance * scale:.3g}"
        )
    if np.any(pi < -1e-9):
        raise SingularSystemError("negative stationary probabilities")
    # rounding can leave states of negligible mass slightly below zero
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def oracle_distribution(
    params: ClusterParams, alloc: Allocation, max_states: Optional[int] = None
) -> np.ndarray:
    return solve_stationary(build_generator(params, alloc, max_states=max_states))


def oracle_metrics(
    params: ClusterParams, alloc: Allocation, max_states: Optional[int] = None
) -> MetricsReport:
    """Metrics recomputed from the numerically solved chain."""
    gen = build_generator(params, alloc, max_states=max_states)
    pi = solve_stationary(gen)
    states = gen.lattice.states
    ell = np.asarray(alloc.ell)

    loss = float(pi[0])
    occupation = tuple(float(pi[states[:, i] < ell[i]].sum()) for i in range(len(ell)))
    mean_jobs = tuple(float(v) for v in (ell[None, :] - states).T @ pi)
    throughput = params.lam * (1.0 - loss)
    response = None if alloc.total == 0 else math.fsum(mean_jobs) / throughput

    return MetricsReport(
        loss=loss,
        occupation=occupation,
        mean_jobs=mean_jobs,
        mean_response_time=response,
        norm_const_log=-math.log(loss) if loss > 0.0 else math.inf,
        throughput=throughput,
        empty_servers=tuple(i for i, e in enumerate(alloc.ell) if e == 0),
    )
