from __future__ import annotations

import functools
import itertools
import math
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from slotlime.model.cluster import Allocation, StateVector
from slotlime.model.errors import CapacityExceededError, StateOutOfRangeError


def _level_counts(bounds: Sequence[int], max_level: int) -> int:
    # coefficients of prod_i (1 + z + ... + z^b_i), truncated at max_level
    coeffs = [1] + [0] * max_level
    for b in bounds:
        out = [0] * (max_level + 1)
        for level, c in enumerate(coeffs):
            if c:
                for k in range(min(b, max_level - level) + 1):
                    out[level + k] += c
        coeffs = out
    return sum(coeffs)


class StateLattice:
    """The states ``0 <= x <= bounds`` (optionally restricted to ``sum(x) <= max_level``)
    in row-major order, with a bijective index.

    The lattice is down-closed, so ``x - e_i`` is always a member when ``x_i >= 1``.
    """

    DEFAULT_MAX_STATES = 10**6

    def __init__(
        self,
        bounds: Sequence[int],
        max_level: Optional[int] = None,
        max_states: Optional[int] = None,
    ):
        self._bounds = tuple(int(b) for b in bounds)
        if any(b < 0 for b in self._bounds):
            raise StateOutOfRangeError(f"negative lattice bound in {self._bounds}")

        total = sum(self._bounds)
        self._max_level = total if max_level is None else max(0, min(int(max_level), total))
        self._max_states = self.DEFAULT_MAX_STATES if max_states is None else int(max_states)

        size = self.count(self._bounds, self._max_level)
        if size > self._max_states:
            raise CapacityExceededError(
                f"lattice of {size} states exceeds the cap of {self._max_states}"
            )

        self._radix = np.array(self._bounds, dtype=np.int64) + 1
        self._strides = np.array(
            [int(np.prod(self._radix[i + 1 :])) for i in range(self.n_dims)], dtype=np.int64
        )
        self._states = self._enumerate()
        self._keys = self._states @ self._strides
        self._levels = self._states.sum(axis=1)
        for arr in (self._states, self._keys, self._levels):
            arr.setflags(write=False)

    @classmethod
    def count(cls, bounds: Sequence[int], max_level: Optional[int] = None) -> int:
        total = sum(bounds)
        if max_level is None or max_level >= total:
            return math.prod(b + 1 for b in bounds)
        return _level_counts(bounds, max_level)

    def _enumerate(self) -> np.ndarray:
        n = self.n_dims
        box = math.prod(self._bounds[i] + 1 for i in range(n))
        simplex = math.comb(self._max_level + n, n)
        if box <= simplex:
            states = np.indices(tuple(self._radix)).reshape(n, -1).T
            if self._max_level < sum(self._bounds):
                states = states[states.sum(axis=1) <= self._max_level]
            return np.ascontiguousarray(states, dtype=np.int64)

        # stars and bars over n parts plus one slack part
        bars = np.array(
            list(itertools.combinations(range(self._max_level + n), n)), dtype=np.int64
        ).reshape(-1, n)
        left = np.full((bars.shape[0], 1), -1, dtype=np.int64)
        states = np.diff(np.hstack([left, bars]), axis=1) - 1
        states = states[np.all(states <= np.array(self._bounds), axis=1)]
        order = np.argsort(states @ self._strides, kind="stable")
        return np.ascontiguousarray(states[order])

    @property
    def bounds(self) -> Tuple[int, ...]:
        return self._bounds

    @property
    def max_level(self) -> int:
        return self._max_level

    @property
    def n_dims(self) -> int:
        return len(self._bounds)

    @property
    def states(self) -> np.ndarray:
        """(size, N) read-only array of the states, in lattice order."""
        return self._states

    @property
    def levels(self) -> np.ndarray:
        return self._levels

    @functools.cached_property
    def level_groups(self) -> Tuple[np.ndarray, ...]:
        """State indices grouped by level ``sum(x)``; each group keeps lattice order."""
        order = np.argsort(self._levels, kind="stable")
        cuts = np.searchsorted(self._levels[order], np.arange(1, self._max_level + 1))
        return tuple(np.split(order, cuts))

    def __len__(self) -> int:
        return self._states.shape[0]

    def __iter__(self) -> Iterator[StateVector]:
        for row in self._states:
            yield StateVector(tuple(row))

    def state(self, index: int) -> StateVector:
        return StateVector(tuple(self._states[index]))

    def index(self, state: Union[StateVector, Sequence[int]]) -> int:
        x = state.x if isinstance(state, StateVector) else tuple(state)
        return int(self.indices(np.asarray([x], dtype=np.int64))[0])

    def indices(self, states: np.ndarray) -> np.ndarray:
        """Vectorized state -> index lookup.

        Raises:
            StateOutOfRangeError: if any row is not a member of the lattice
        """
        states = np.asarray(states, dtype=np.int64).reshape(-1, self.n_dims)
        if np.any(states < 0) or np.any(states > np.array(self._bounds)):
            raise StateOutOfRangeError(f"states outside 0 <= x <= {self._bounds}")
        keys = states @ self._strides
        pos = np.searchsorted(self._keys, keys)
        pos_clipped = np.minimum(pos, len(self) - 1)
        if np.any(self._keys[pos_clipped] != keys):
            raise StateOutOfRangeError(f"states above level {self._max_level}")
        return pos

    def down(self, i: int) -> np.ndarray:
        """Index of ``x - e_i`` for every state, -1 where ``x_i == 0``."""
        has = self._states[:, i] > 0
        out = np.full(len(self), -1, dtype=np.int64)
        out[has] = np.searchsorted(self._keys, self._keys[has] - self._strides[i])
        return out

    def up(self, i: int) -> np.ndarray:
        """Index of ``x + e_i`` for every state, -1 where it leaves the lattice."""
        ok = (self._states[:, i] < self._bounds[i]) & (self._levels < self._max_level)
        out = np.full(len(self), -1, dtype=np.int64)
        out[ok] = np.searchsorted(self._keys, self._keys[ok] + self._strides[i])
        return out


@functools.lru_cache(maxsize=32)
def _cached_lattice(
    bounds: Tuple[int, ...], max_level: Optional[int], max_states: Optional[int]
) -> StateLattice:
    return StateLattice(bounds, max_level=max_level, max_states=max_states)


def state_lattice(
    alloc: Union[Allocation, Sequence[int]],
    max_level: Optional[int] = None,
    max_states: Optional[int] = None,
) -> StateLattice:
    """Lattice of all states ``x <= ell`` for an allocation; instances are shared
    between callers since they are read-only.

    Raises:
        CapacityExceededError: if the state count is above ``max_states``
            (default ``StateLattice.DEFAULT_MAX_STATES``)
    """
    bounds = tuple(int(b) for b in alloc)
    return _cached_lattice(bounds, max_level, max_states)
