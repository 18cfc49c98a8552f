from __future__ import annotations

import math
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, validator

from slotlime.model.cluster import Allocation, ClusterParams


class Scheduler(str, Enum):
    PS = "ps"
    FCFS = "fcfs"


class ServiceKind(str, Enum):
    EXPONENTIAL = "exponential"
    DETERMINISTIC = "deterministic"
    HYPEREXPONENTIAL = "hyperexponential"


class ServiceDistribution(BaseModel):
    """Job size distribution, always with unit mean; a job of size s needs s / mu_i
    time units of exclusive service at server i."""

    kind: ServiceKind = ServiceKind.EXPONENTIAL
    p: Optional[float] = None
    rate1: Optional[float] = None
    rate2: Optional[float] = None

    @validator("rate2", always=True)
    def _unit_mean_mixture(cls, v, values):
        if values.get("kind") != ServiceKind.HYPEREXPONENTIAL:
            return v
        p, r1 = values.get("p"), values.get("rate1")
        if p is None or r1 is None or v is None:
            raise ValueError("hyperexponential sizes need p, rate1 and rate2")
        if not 0 < p < 1 or r1 <= 0 or v <= 0:
            raise ValueError("hyperexponential needs 0 < p < 1 and positive rates")
        mean = p / r1 + (1 - p) / v
        if abs(mean - 1.0) > 1e-9:
            raise ValueError(f"hyperexponential mean must be 1, got {mean}")
        return v

    @classmethod
    def exponential(cls) -> ServiceDistribution:
        return cls(kind=ServiceKind.EXPONENTIAL)

    @classmethod
    def deterministic(cls) -> ServiceDistribution:
        return cls(kind=ServiceKind.DETERMINISTIC)

    @classmethod
    def hyperexponential_scv(cls, scv: float) -> ServiceDistribution:
        """Two-phase hyperexponential with unit mean and the given squared coefficient
        of variation, each phase carrying half of the mean."""
        if scv <= 1:
            raise ValueError(f"a hyperexponential needs scv > 1, got {scv}")
        p = (1.0 - math.sqrt((scv - 1.0) / (scv + 1.0))) / 2.0
        return cls(kind=ServiceKind.HYPEREXPONENTIAL, p=p, rate1=2.0 * p, rate2=2.0 * (1.0 - p))

    @property
    def scv(self) -> float:
        if self.kind == ServiceKind.EXPONENTIAL:
            return 1.0
        if self.kind == ServiceKind.DETERMINISTIC:
            return 0.0
        second = 2.0 * self.p / self.rate1**2 + 2.0 * (1.0 - self.p) / self.rate2**2
        return second - 1.0

    @property
    def label(self) -> str:
        if self.kind == ServiceKind.HYPEREXPONENTIAL:
            return f"hyperexponential(scv={self.scv:.3g})"
        return self.kind.value

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == ServiceKind.EXPONENTIAL:
            return rng.exponential(1.0, size)
        if self.kind == ServiceKind.DETERMINISTIC:
            return np.ones(size)
        phase_one = rng.random(size) < self.p
        rates = np.where(phase_one, self.rate1, self.rate2)
        return rng.exponential(1.0, size) / rates


class SimConfig(BaseModel):
    """One simulation experiment. ``mu`` and ``ell`` are in user order."""

    lam: float
    mu: Tuple[float, ...]
    ell: Tuple[int, ...]
    scheduler: Scheduler = Scheduler.PS
    service: ServiceDistribution = ServiceDistribution()
    arrivals: int = 1_000_000
    max_time: Optional[float] = None
    warmup_fraction: float = 0.2
    replications: int = 20
    seed: int = 0
    confidence: float = 0.95

    @validator("arrivals")
    def _positive_arrivals(cls, v):
        if v < 1:
            raise ValueError("at least one arrival is required")
        return v

    @validator("warmup_fraction")
    def _warmup_in_range(cls, v):
        if not 0.0 <= v < 1.0:
            raise ValueError("warmup_fraction must be in [0, 1)")
        return v

    @validator("replications")
    def _at_least_two(cls, v):
        if v < 2:
            raise ValueError("at least two replications are required")
        return v

    @validator("seed")
    def _u64(cls, v):
        if not 0 <= v < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return v

    @validator("confidence")
    def _probability(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError("confidence must be in (0, 1)")
        return v

    @property
    def params(self) -> ClusterParams:
        return ClusterParams(lam=self.lam, mu=tuple(self.mu))

    @property
    def allocation(self) -> Allocation:
        return self.params.allocation(self.ell)

    @property
    def warmup_arrivals(self) -> int:
        return int(self.warmup_fraction * self.arrivals)
