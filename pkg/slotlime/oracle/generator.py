from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger
from scipy import sparse

from slotlime.model.cluster import Allocation, ClusterParams, validate
from slotlime.model.lattice import StateLattice, state_lattice

DEFAULT_MAX_STATES = 5000


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Generator of the token network on the lattice ``x <= ell``.

    ``rates`` holds the off-diagonal transition rates only; the diagonal is
    minus the outflow of each state.
    """

    params: ClusterParams
    alloc: Allocation
    lattice: StateLattice
    rates: sparse.csr_matrix

    @property
    def dim(self) -> int:
        return self.rates.shape[0]

    @property
    def outflow(self) -> np.ndarray:
        return np.asarray(self.rates.sum(axis=1)).ravel()

    def full(self) -> sparse.csr_matrix:
        """Q with its diagonal."""
        return (self.rates - sparse.diags(self.outflow)).tocsr()


def build_generator(
    params: ClusterParams, alloc: Allocation, max_states: Optional[int] = None
) -> GeneratorMatrix:
    """From state x: an arrival moves to x - e_i at rate lambda x_i / sum(x) (when any
    slot is free), a completion at server i moves to x + e_i at rate mu_i when x_i < ell_i.

    Raises:
        CapacityExceededError: if the lattice has more than ``max_states`` states
            (default 5000)
    """
    validate(params, alloc)
    lattice = state_lattice(
        alloc, max_states=DEFAULT_MAX_STATES if max_states is None else max_states
    )
    states = lattice.states
    free = states.sum(axis=1)
    src = np.arange(len(lattice))

    rows, cols, data = [], [], []
    for i in range(lattice.n_dims):
        down = lattice.down(i)
        has = down >= 0
        rows.append(src[has])
        cols.append(down[has])
        data.append(params.lam * states[has, i] / free[has])

        up = lattice.up(i)
        ok = up >= 0
        rows.append(src[ok])
        cols.append(up[ok])
        data.append(np.full(int(ok.sum()), params.mu[i]))

    rates = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(lattice), len(lattice)),
    ).tocsr()
    logger.debug(f"generator with {len(lattice)} states and {rates.nnz} transitions")
    return GeneratorMatrix(params=params, alloc=alloc, lattice=lattice, rates=rates)
