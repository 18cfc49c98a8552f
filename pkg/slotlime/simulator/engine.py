from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from slotlime.simulator.config import Scheduler, SimConfig

_CHUNK = 4096


class _Stream:
    """Draws from a numpy generator in chunks and hands values out one by one."""

    def __init__(self, draw: Callable[[int], np.ndarray]):
        self._draw = draw
        self._buffer: List[float] = []
        self._pos = 0

    def next(self) -> float:
        if self._pos == len(self._buffer):
            self._buffer = self._draw(_CHUNK).tolist()
            self._pos = 0
        value = self._buffer[self._pos]
        self._pos += 1
        return value


class _PSServer:
    # virtual time: service attained by each resident job since the server was created
    def __init__(self, rate: float):
        self.rate = rate
        self.virtual = 0.0
        self.jobs: List[Tuple[float, int, float]] = []
        self._seq = 0

    @property
    def n(self) -> int:
        return len(self.jobs)

    def advance(self, dt: float) -> None:
        if self.jobs:
            self.virtual += dt * self.rate / len(self.jobs)

    def time_to_completion(self) -> float:
        if not self.jobs:
            return math.inf
        return max(self.jobs[0][0] - self.virtual, 0.0) * len(self.jobs) / self.rate

    def add(self, size: float, now: float) -> None:
        self._seq += 1
        heapq.heappush(self.jobs, (self.virtual + size, self._seq, now))

    def pop(self) -> float:
        return heapq.heappop(self.jobs)[2]


class _FCFSServer:
    def __init__(self, rate: float):
        self.rate = rate
        self.jobs = deque()
        self.head_left = 0.0

    @property
    def n(self) -> int:
        return len(self.jobs)

    def advance(self, dt: float) -> None:
        if self.jobs:
            self.head_left -= dt * self.rate

    def time_to_completion(self) -> float:
        if not self.jobs:
            return math.inf
        return max(self.head_left, 0.0) / self.rate

    def add(self, size: float, now: float) -> None:
        if not self.jobs:
            self.head_left = size
        self.jobs.append((size, now))

    def pop(self) -> float:
        _, arrived = self.jobs.popleft()
        if self.jobs:
            self.head_left = self.jobs[0][0]
        return arrived


@dataclass(frozen=True)
class ReplicationTally:
    """Post-warmup counters and time averages of one replication, servers in
    non-increasing rate order."""

    arrivals: int
    admitted: int
    rejected: int
    completed: int
    duration: float
    mean_jobs: Tuple[float, ...]
    busy: Tuple[float, ...]
    full_fraction: float
    response_time_sum: float

    @property
    def loss(self) -> float:
        return self.rejected / self.arrivals if self.arrivals else math.nan

    @property
    def mean_response_time(self) -> float:
        return self.response_time_sum / self.completed if self.completed else math.nan

    @property
    def throughput(self) -> float:
        return self.admitted / self.duration if self.duration > 0 else math.nan

    @property
    def little_gap(self) -> float:
        """mean jobs in system minus throughput times mean response time."""
        if not self.completed:
            return 0.0
        return math.fsum(self.mean_jobs) - self.throughput * self.mean_response_time

    @property
    def pasta_gap(self) -> float:
        """fraction of rejected arrivals minus fraction of time with every slot taken."""
        return self.loss - self.full_fraction


def replication_streams(cfg: SimConfig, rep_index: int) -> List[np.random.Generator]:
    """Independent generators for one replication: arrivals first, then one per server."""
    root = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)[rep_index]
    return [np.random.default_rng(s) for s in root.spawn(1 + len(cfg.mu))]


def run_replication(cfg: SimConfig, rep_index: int) -> ReplicationTally:
    """Event-driven run of the cluster: Poisson arrivals, dispatch to server i with
    probability x_i / sum(x) over the free slots x, loss when no slot is free.

    Arrivals are counted up to ``cfg.arrivals``; the first ``cfg.warmup_arrivals`` and
    the time before them are discarded.
    """
    params, alloc = cfg.params, cfg.allocation
    n_servers = params.n_servers
    ell = list(alloc.ell)

    rngs = replication_streams(cfg, rep_index)
    arrival_rng = rngs[0]
    gaps = _Stream(lambda k: arrival_rng.exponential(1.0 / params.lam, k))
    picks = _Stream(lambda k: arrival_rng.random(k))
    sizes = [
        _Stream(lambda k, g=rngs[1 + i]: cfg.service.sample(g, k)) for i in range(n_servers)
    ]
    server_cls = _PSServer if cfg.scheduler == Scheduler.PS else _FCFSServer
    servers = [server_cls(rate) for rate in params.mu]

    warmup = cfg.warmup_arrivals
    horizon = cfg.arrivals
    max_time = math.inf if cfg.max_time is None else cfg.max_time

    now = 0.0
    start = None
    next_arrival = gaps.next()
    count = 0
    window_arrivals = admitted = rejected = completed = 0
    response_sum = 0.0
    job_area = [0.0] * n_servers
    busy_time = [0.0] * n_servers
    full_time = 0.0
    total_slots = sum(ell)
    in_system = 0

    while True:
        waits = [s.time_to_completion() for s in servers]
        server = min(range(n_servers), key=waits.__getitem__) if n_servers else 0
        completion = now + waits[server] if n_servers else math.inf
        is_arrival = next_arrival <= completion
        event_time = next_arrival if is_arrival else completion
        # the arrival after the last counted one closes the window
        stop = is_arrival and count >= horizon
        if event_time > max_time:
            event_time, stop = max_time, True

        dt = event_time - now
        if start is not None and dt > 0:
            for i, s in enumerate(servers):
                if s.n:
                    job_area[i] += s.n * dt
                    busy_time[i] += dt
            if in_system == total_slots:
                full_time += dt
        for s in servers:
            s.advance(dt)
        now = event_time
        if stop:
            break

        if not is_arrival:
            arrived = servers[server].pop()
            in_system -= 1
            if arrived >= 0.0:
                completed += 1
                response_sum += now - arrived
            continue

        count += 1
        if count == warmup + 1:
            start = now
        measuring = start is not None
        if measuring:
            window_arrivals += 1
        free = [e - s.n for e, s in zip(ell, servers)]
        total_free = sum(free)
        if total_free == 0:
            if measuring:
                rejected += 1
        else:
            k = min(int(picks.next() * total_free), total_free - 1)
            target = 0
            while k >= free[target]:
                k -= free[target]
                target += 1
            # warmup jobs carry a negative arrival time and are not measured
            servers[target].add(sizes[target].next(), now if measuring else -1.0)
            in_system += 1
            if measuring:
                admitted += 1
        next_arrival = now + gaps.next()

    duration = now - start if start is not None else 0.0
    scale = 1.0 / duration if duration > 0 else 0.0
    return ReplicationTally(
        arrivals=window_arrivals,
        admitted=admitted,
        rejected=rejected,
        completed=completed,
        duration=duration,
        mean_jobs=tuple(a * scale for a in job_area),
        busy=tuple(b * scale for b in busy_time),
        full_fraction=full_time * scale,
        response_time_sum=response_sum,
    )
