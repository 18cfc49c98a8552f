from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from loguru import logger
from scipy.special import gammaln, logsumexp

from slotlime.model.cluster import Allocation, ClusterParams, StateVector, validate
from slotlime.model.errors import CapacityExceededError
from slotlime.model.lattice import StateLattice, state_lattice


def log_weights(params: ClusterParams, states: np.ndarray) -> np.ndarray:
    """Unnormalized log stationary weights multinomial(x) * prod (mu_i/lambda)^x_i."""
    states = np.asarray(states, dtype=np.int64).reshape(-1, params.n_servers)
    totals = states.sum(axis=1)
    return (
        gammaln(totals + 1.0)
        - gammaln(states + 1.0).sum(axis=1)
        + states @ params.log_ratios
    )


@dataclass(frozen=True, eq=False)
class NormTable:
    """Normalization constants G(k) for every k of a lattice, stored as log G(k).

    Every G(k) >= 1, so log values are non-negative and no sign is needed.
    """

    params: ClusterParams
    lattice: StateLattice
    log_values: np.ndarray

    @classmethod
    def build(
        cls,
        params: ClusterParams,
        bounds: Sequence[int],
        max_level: Optional[int] = None,
        max_states: Optional[int] = None,
    ) -> NormTable:
        """Runs G(k) = 1 + sum_{i: k_i >= 1} (mu_i/lambda) G(k - e_i) over the lattice,
        one level at a time, with log-sum-exp accumulation."""
        lattice = state_lattice(tuple(bounds), max_level=max_level, max_states=max_states)
        n = lattice.n_dims
        log_r = params.log_ratios

        down = np.stack([lattice.down(i) for i in range(n)], axis=1)
        log_g = np.zeros(len(lattice), dtype=float)
        for group in lattice.level_groups[1:]:
            parents = down[group]
            terms = np.full((len(group), n + 1), -np.inf)
            terms[:, n] = 0.0
            valid = parents >= 0
            terms[:, :n] = np.where(
                valid, log_r[None, :] + log_g[np.where(valid, parents, 0)], -np.inf
            )
            log_g[group] = logsumexp(terms, axis=1)

        log_g.setflags(write=False)
        logger.debug(
            f"normalization table over {len(lattice)} states, bounds {lattice.bounds}"
        )
        return cls(params=params, lattice=lattice, log_values=log_g)

    @property
    def dims(self):
        return self.lattice.bounds

    def log_g(self, k: Union[Allocation, StateVector, Sequence[int]]) -> float:
        if isinstance(k, Allocation):
            k = k.ell
        return float(self.log_values[self.lattice.index(k)])

    def g(self, k: Union[Allocation, StateVector, Sequence[int]]) -> float:
        return float(np.exp(self.log_g(k)))

    @functools.cached_property
    def log_partial_sums(self) -> np.ndarray:
        """(size, N) array of log S_i(k), S_i(k) = sum_{m < k_i} G(k with k_i = m).

        S_i(k) = S_i(k - e_i) + G(k - e_i); -inf where k_i = 0. The mean number of
        jobs at server i is S_i(l) / G(l).
        """
        lattice = self.lattice
        n = lattice.n_dims
        out = np.full((len(lattice), n), -np.inf)
        for i in range(n):
            down = lattice.down(i)
            for group in lattice.level_groups[1:]:
                parents = down[group]
                has = parents >= 0
                idx, par = group[has], parents[has]
                out[idx, i] = np.logaddexp(out[par, i], self.log_values[par])
        out.setflags(write=False)
        return out


def norm_const(
    params: ClusterParams, alloc: Allocation, max_states: Optional[int] = None
) -> NormTable:
    """Normalization table over all sub-allocations ``k <= ell``.

    Raises:
        CapacityExceededError: if prod(ell_i + 1) is above the lattice cap
    """
    validate(params, alloc)
    return NormTable.build(params, alloc.ell, max_states=max_states)


def simplex_table(
    params: ClusterParams, total_slots: int, max_states: Optional[int] = None
) -> NormTable:
    """One table over ``{k : sum(k) <= total_slots}``, holding G for every composition
    of ``total_slots`` and all their sub-allocations."""
    n = params.n_servers
    validate(params, Allocation((0,) * n))
    return NormTable.build(
        params, (int(total_slots),) * n, max_level=int(total_slots), max_states=max_states
    )


DIRECT_MAX_TOTAL = 30


def norm_const_direct(
    params: ClusterParams, alloc: Allocation, max_total: int = DIRECT_MAX_TOTAL
) -> float:
    """log G(ell) from the explicit sum of product-form weights over ``x <= ell``."""
    validate(params, alloc)
    if alloc.total > max_total:
        raise CapacityExceededError(
            f"direct sum limited to {max_total} slots, allocation has {alloc.total}"
        )
    lattice = state_lattice(alloc)
    return float(logsumexp(log_weights(params, lattice.states)))
