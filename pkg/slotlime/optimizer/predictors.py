from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Sequence

import numpy as np
from loguru import logger
from scipy.special import gammaln

from slotlime.model.cluster import Allocation
from slotlime.model.errors import PreconditionError
from slotlime.productform.deltas import remark_one_tie

EXHAUSTIVE_MODE_LIMIT = 100_000


def _sorted_shares(mu: Sequence[float]) -> List[Fraction]:
    rates = sorted((Fraction(float(m)).limit_denominator(10**9) for m in mu), reverse=True)
    total = sum(rates)
    return [r / total for r in rates]


def _check_total(total_slots: int) -> None:
    if total_slots < 1:
        raise PreconditionError(f"at least one slot is required, got {total_slots}")


def multinomial_mode(mu: Sequence[float], total_slots: int) -> Allocation:
    """A mode of Multinomial(L; mu / sum(mu)), servers in non-increasing rate order.

    Slots are added one at a time to the server with the largest p_i / (l_i + 1),
    first index on ties. When the number of compositions allows it the result is
    checked against an exhaustive maximization of the pmf.
    """
    shares = _sorted_shares(mu)
    ell = [0] * len(shares)
    for _ in range(total_slots):
        best = max(range(len(shares)), key=lambda k: (shares[k] / (ell[k] + 1), -k))
        ell[best] += 1
    mode = Allocation(tuple(ell))

    if Allocation.count_compositions(total_slots, len(shares)) <= EXHAUSTIVE_MODE_LIMIT:
        comps = Allocation.compositions(total_slots, len(shares))
        log_p = np.log(np.array([float(s) for s in shares]))
        log_pmf = comps @ log_p - gammaln(comps + 1.0).sum(axis=1)
        greedy = float(np.asarray(ell) @ log_p - gammaln(np.asarray(ell) + 1.0).sum())
        top = int(np.argmax(log_pmf))
        if log_pmf[top] > greedy + 1e-12:
            logger.warning(f"greedy multinomial mode {mode.ell} replaced by {tuple(comps[top])}")
            mode = Allocation(tuple(comps[top]))
    return mode


def low_traffic_candidates(mu: Sequence[float], total_slots: int) -> List[Allocation]:
    """Allocations optimal for the loss probability as lambda -> 0.

    Two servers: l1 = ceil(p1 L - p2), plus l1 = floor(p1 L + p1) when the two differ
    (p1 (L + 1) is an integer and exact evaluation has to decide). More servers: the
    multinomial mode.
    """
    _check_total(total_slots)
    if len(mu) != 2:
        return [multinomial_mode(mu, total_slots)]

    p1, p2 = _sorted_shares(mu)
    first = math.ceil(p1 * total_slots - p2)
    candidates = [Allocation((first, total_slots - first))]
    if remark_one_tie(mu, total_slots):
        second = math.floor(p1 * total_slots + p1)
        logger.warning(f"two low-traffic candidates for L={total_slots}: l1={first} or {second}")
        candidates.append(Allocation((second, total_slots - second)))
    return candidates


def low_traffic_predictor(mu: Sequence[float], total_slots: int) -> Allocation:
    return low_traffic_candidates(mu, total_slots)[0]


def heavy_traffic_predictor(mu: Sequence[float], total_slots: int) -> Allocation:
    """Balanced allocation, the remainder of L / N going to the fastest servers."""
    _check_total(total_slots)
    base, extra = divmod(total_slots, len(mu))
    return Allocation(tuple(base + (1 if k < extra else 0) for k in range(len(mu))))
