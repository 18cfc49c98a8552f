from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from slotlime.model.errors import (
    DimensionMismatchError,
    NegativeBufferLengthError,
    NonPositiveRateError,
    StateOutOfRangeError,
    ValidationError,
)


def _as_int_tuple(values: Sequence[Any]) -> Tuple[Any, ...]:
    # integral floats/numpy ints become python ints, anything else is kept for validate()
    out = []
    for v in values:
        try:
            out.append(int(v) if float(v).is_integer() else v)
        except (TypeError, ValueError, OverflowError):
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class ClusterParams:
    """Arrival rate and service rates of a cluster.

    Service rates are stored sorted non-increasing (stable, so equal rates keep the
    user order); ``order[j]`` is the user index of the j-th fastest server.
    """

    lam: float
    mu: Tuple[float, ...]
    order: Optional[Tuple[int, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        try:
            lam = float(self.lam)
            mu = tuple(float(m) for m in self.mu)
        except (TypeError, ValueError) as e:
            raise NonPositiveRateError(
                f"rates must be numbers, got lambda={self.lam!r} mu={self.mu!r}"
            ) from e
        if self.order is None:
            order = tuple(sorted(range(len(mu)), key=lambda k: -mu[k]))
            mu = tuple(mu[k] for k in order)
        else:
            order = tuple(int(k) for k in self.order)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "order", order)

    @property
    def n_servers(self) -> int:
        return len(self.mu)

    @property
    def shares(self) -> Tuple[float, ...]:
        total = math.fsum(self.mu)
        return tuple(m / total for m in self.mu)

    @property
    def log_ratios(self) -> np.ndarray:
        """log(mu_i / lambda) for every server, in sorted order."""
        return np.log(np.asarray(self.mu, dtype=float)) - math.log(self.lam)

    def with_lambda(self, lam: float) -> ClusterParams:
        return replace(self, lam=float(lam))

    def allocation(self, user_ell: Sequence[int]) -> Allocation:
        """Builds an Allocation (sorted server order) from a vector in user order."""
        user_ell = tuple(user_ell)
        if len(user_ell) != self.n_servers:
            raise DimensionMismatchError(
                f"{self.n_servers} service rates but {len(user_ell)} buffer lengths"
            )
        return Allocation(tuple(user_ell[k] for k in self.order))

    def to_user_order(self, values: Sequence[Any]) -> List[Any]:
        out: List[Any] = [None] * len(values)
        for j, k in enumerate(self.order):
            out[k] = values[j]
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {"lambda": self.lam, "mu": self.to_user_order(list(self.mu))}


@dataclass(frozen=True)
class Allocation:
    """Buffer lengths, one entry per server, in sorted (non-increasing rate) order."""

    ell: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ell", _as_int_tuple(self.ell))

    def __len__(self) -> int:
        return len(self.ell)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ell)

    def __getitem__(self, i: int) -> int:
        return self.ell[i]

    @property
    def total(self) -> int:
        return int(sum(self.ell))

    def unit_shift(self, i: int, j: int) -> Allocation:
        """ell + e_i - e_j, i.e. one slot moved from server j to server i."""
        ell = list(self.ell)
        ell[i] += 1
        ell[j] -= 1
        return Allocation(tuple(ell))

    def with_length(self, i: int, length: int) -> Allocation:
        ell = list(self.ell)
        ell[i] = length
        return Allocation(tuple(ell))

    @classmethod
    def count_compositions(cls, total: int, n: int) -> int:
        return math.comb(total + n - 1, n - 1)

    @classmethod
    def compositions(cls, total: int, n: int) -> np.ndarray:
        """All vectors of ``n`` non-negative integers summing to ``total``, as rows of
        an array in lexicographic order (stars and bars)."""
        bars = np.array(
            list(itertools.combinations(range(total + n - 1), n - 1)), dtype=np.int64
        ).reshape(-1, n - 1)
        left = np.full((bars.shape[0], 1), -1, dtype=np.int64)
        right = np.full((bars.shape[0], 1), total + n - 1, dtype=np.int64)
        return np.diff(np.hstack([left, bars, right]), axis=1) - 1


@dataclass(frozen=True)
class StateVector:
    """Free slots per server: the state of the token network."""

    x: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))

    def __len__(self) -> int:
        return len(self.x)

    def check(self, alloc: Allocation) -> None:
        if len(self.x) != len(alloc) or any(
            v < 0 or v > e for v, e in zip(self.x, alloc.ell)
        ):
            raise StateOutOfRangeError(f"state {self.x} is not within 0 <= x <= {alloc.ell}")

    def jobs(self, alloc: Allocation) -> Tuple[int, ...]:
        """Jobs per server, n = ell - x."""
        return tuple(e - v for e, v in zip(alloc.ell, self.x))


@dataclass(frozen=True)
class MetricsReport:
    loss: float
    occupation: Tuple[float, ...]
    mean_jobs: Tuple[float, ...]
    mean_response_time: Optional[float]
    norm_const_log: float
    throughput: float
    empty_servers: Tuple[int, ...] = ()

    def in_user_order(self, params: ClusterParams) -> MetricsReport:
        return replace(
            self,
            occupation=tuple(params.to_user_order(self.occupation)),
            mean_jobs=tuple(params.to_user_order(self.mean_jobs)),
            empty_servers=tuple(sorted(params.order[i] for i in self.empty_servers)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "loss": self.loss,
            "occupation": list(self.occupation),
            "mean_jobs": list(self.mean_jobs),
            "mean_response_time": self.mean_response_time,
            "throughput": self.throughput,
            "log_norm_const": self.norm_const_log,
            "empty_servers": list(self.empty_servers),
        }


def _is_positive_finite(value: Any) -> bool:
    try:
        return math.isfinite(value) and value > 0
    except TypeError:
        return False


def validate(params: ClusterParams, alloc: Allocation) -> bool:
    """Checks both invariants and that dimensions agree.

    Raises:
        NonPositiveRateError: lambda or some mu_i is not a positive finite number
        DimensionMismatchError: no servers, or len(ell) differs from len(mu)
        NegativeBufferLengthError: some ell_i is negative or not an integer

    Returns:
        bool: True when the pair is valid
    """
    if not _is_positive_finite(params.lam):
        raise NonPositiveRateError(f"arrival rate must be positive, got {params.lam}")
    if params.n_servers < 1:
        raise DimensionMismatchError("at least one server is required")
    for i, m in enumerate(params.mu):
        if not _is_positive_finite(m):
            raise NonPositiveRateError(f"service rate of server {i} must be positive, got {m}")
    if len(alloc) != params.n_servers:
        raise DimensionMismatchError(
            f"{params.n_servers} service rates but {len(alloc)} buffer lengths"
        )
    for i, e in enumerate(alloc.ell):
        if isinstance(e, bool) or not isinstance(e, (int, np.integer)):
            raise NegativeBufferLengthError(f"buffer length {e!r} is not an integer")
        if e < 0:
            raise NegativeBufferLengthError(f"buffer length of server {i} is negative: {e}")
    return True


__all__ = [
    "Allocation",
    "ClusterParams",
    "MetricsReport",
    "StateVector",
    "ValidationError",
    "validate",
]
