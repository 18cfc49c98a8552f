from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, validator

from slotlime.model.cluster import Allocation, ClusterParams

DEFAULT_TIE_TOLERANCE = 1e-12
DEFAULT_MAX_COMPOSITIONS = 200_000


class Metric(str, Enum):
    LOSS = "loss"
    RESPONSE_TIME = "response_time"


class OptimizationQuery(BaseModel):
    lam: float
    mu: Tuple[float, ...]
    total_slots: int
    metric: Metric = Metric.LOSS
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE
    max_compositions: int = DEFAULT_MAX_COMPOSITIONS

    @validator("total_slots")
    def _at_least_one_slot(cls, v):
        if v < 1:
            raise ValueError("total_slots must be at least 1")
        return v

    @validator("lam")
    def _positive_arrival_rate(cls, v):
        if not v > 0 or v == float("inf"):
            raise ValueError("lam must be a positive finite number")
        return v

    @validator("mu")
    def _some_servers(cls, v):
        if len(v) < 1:
            raise ValueError("at least one service rate is required")
        if any(not m > 0 or m == float("inf") for m in v):
            raise ValueError("service rates must be positive finite numbers")
        return v

    @validator("tie_tolerance")
    def _non_negative_tolerance(cls, v):
        if v < 0:
            raise ValueError("tie_tolerance must be non-negative")
        return v

    @property
    def params(self) -> ClusterParams:
        return ClusterParams(lam=self.lam, mu=tuple(self.mu))


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """Outcome of an exhaustive search over the compositions of ``total_slots``.

    ``compositions`` and ``values`` are in lexicographic composition order, servers in
    non-increasing rate order; ``canonical`` is the first of ``minimizers``.
    """

    params: ClusterParams
    metric: Metric
    total_slots: int
    minimizers: Tuple[Allocation, ...]
    best_value: float
    compositions: np.ndarray
    values: np.ndarray
    near_ties: int = 1

    @property
    def canonical(self) -> Allocation:
        return self.minimizers[0]

    @property
    def ties(self) -> int:
        return len(self.minimizers)

    def user_canonical(self) -> List[int]:
        return self.params.to_user_order(list(self.canonical.ell))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": self.params.lam,
            "metric": self.metric.value,
            "total_slots": self.total_slots,
            "canonical": self.user_canonical(),
            "minimizers": [self.params.to_user_order(list(m.ell)) for m in self.minimizers],
            "best_value": self.best_value,
            "ties": self.ties,
            "near_ties": self.near_ties,
        }
