from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.special import gammaln

from slotlime.model.cluster import Allocation, ClusterParams, validate
from slotlime.model.errors import EmptyBufferError, NotTwoServersError, PreconditionError
from slotlime.productform.normalization import NormTable

NEAR_TIE_TOLERANCE = 1e-12
ZERO_COEFFICIENT_TOLERANCE = 1e-14

# below this log-gap the two-server subtraction switches to the coefficient expansion
COEFFICIENT_SWITCH = 1e-6

ALL_POSITIVE = "AllPositive"
ALL_NEGATIVE = "AllNegative"
NEG_THEN_POS = "NegThenPos"
UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class DeltaG:
    """Signed value of G(ell + e_i - e_j) - G(ell)."""

    sign: int
    log_abs: float
    near_tie: bool
    method: str

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


@dataclass(frozen=True)
class DeltaCoefficients:
    """Coefficients of delta G(lambda) = sum_n c_n lambda^-n for two servers.

    ``c[k]`` is the coefficient of ``lambda^-(n_min + k)``.
    """

    ell: Tuple[int, int]
    n_min: int
    n_max: int
    c: Tuple[float, ...]
    pattern: str
    n_star: Optional[int] = None

    def coefficient(self, n: int) -> float:
        if n < self.n_min or n > self.n_max:
            return 0.0
        return self.c[n - self.n_min]

    def evaluate(self, lam: float) -> float:
        """Sum of c_n lambda^-n, accumulated exactly-rounded on terms scaled by the largest."""
        c = np.asarray(self.c)
        nz = c != 0.0
        if not nz.any():
            return 0.0
        n = np.arange(self.n_min, self.n_max + 1)[nz]
        log_terms = np.log(np.abs(c[nz])) - n * math.log(lam)
        top = float(log_terms.max())
        scaled = np.sign(c[nz]) * np.exp(log_terms - top)
        return math.fsum(scaled.tolist()) * math.exp(top)

    def signs(self) -> Tuple[int, ...]:
        scale = max((abs(v) for v in self.c), default=0.0)
        tol = ZERO_COEFFICIENT_TOLERANCE * scale
        return tuple(0 if abs(v) <= tol else (1 if v > 0 else -1) for v in self.c)

    def sign_changes(self) -> int:
        nonzero = [s for s in self.signs() if s != 0]
        return sum(1 for a, b in zip(nonzero, nonzero[1:]) if a != b)


def _log_binom(n: np.ndarray, k: int) -> np.ndarray:
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _classify(signs: Sequence[int], n_min: int) -> Tuple[str, Optional[int]]:
    if all(s >= 0 for s in signs):
        return ALL_POSITIVE, None
    if all(s <= 0 for s in signs):
        return ALL_NEGATIVE, None
    # first position after which nothing is negative
    last_negative = max(k for k, s in enumerate(signs) if s < 0)
    star = last_negative + 1
    if all(s <= 0 for s in signs[:star]):
        return NEG_THEN_POS, n_min + star
    return UNCLASSIFIED, None


def delta_g_coefficients(params: ClusterParams, ell: Allocation) -> DeltaCoefficients:
    """Expansion of G(ell + e_1 - e_2) - G(ell) in powers of 1/lambda.

    c_n = [n > ell_1] C(n, ell_1+1) mu_1^(ell_1+1) mu_2^(n-ell_1-1)
        - [n >= ell_2] C(n, ell_2) mu_1^(n-ell_2) mu_2^ell_2,
    for min(ell_1+1, ell_2) <= n <= ell_1+ell_2.

    Raises:
        NotTwoServersError: for anything but two servers
        EmptyBufferError: if the slower server has no slot to give
    """
    if params.n_servers != 2 or len(ell) != 2:
        raise NotTwoServersError(f"coefficients need two servers, got {len(ell)}")
    validate(params, ell)
    l1, l2 = ell.ell
    if l2 < 1:
        raise EmptyBufferError("server 2 has no slot to move")

    log_mu1, log_mu2 = (math.log(m) for m in params.mu)
    n_min, n_max = min(l1 + 1, l2), l1 + l2
    n = np.arange(n_min, n_max + 1)

    gain = np.where(
        n >= l1 + 1,
        np.exp(_log_binom(n, l1 + 1) + (l1 + 1) * log_mu1 + (n - l1 - 1) * log_mu2),
        0.0,
    )
    loss = np.where(
        n >= l2,
        np.exp(_log_binom(n, l2) + (n - l2) * log_mu1 + l2 * log_mu2),
        0.0,
    )
    c = tuple(float(v) for v in gain - loss)

    draft = DeltaCoefficients(ell=(l1, l2), n_min=n_min, n_max=n_max, c=c, pattern="")
    pattern, n_star = _classify(draft.signs(), n_min)
    if pattern == UNCLASSIFIED:
        logger.warning(f"coefficients of {ell.ell} fit none of the sign patterns: {c}")
    return DeltaCoefficients(
        ell=(l1, l2), n_min=n_min, n_max=n_max, c=c, pattern=pattern, n_star=n_star
    )


def delta_g(
    params: ClusterParams,
    alloc: Allocation,
    i: int,
    j: int,
    table: Optional[NormTable] = None,
) -> DeltaG:
    """G(ell + e_i - e_j) - G(ell), moving one slot from server ``j`` to server ``i``.

    Log-gaps below ``NEAR_TIE_TOLERANCE`` are reported as an exact zero with
    ``near_tie`` set. With two servers and a log-gap below ``COEFFICIENT_SWITCH``
    the coefficient expansion replaces the subtraction.

    Raises:
        EmptyBufferError: if server ``j`` has no slot
    """
    validate(params, alloc)
    if i == j:
        raise PreconditionError("a slot must move between two different servers")
    if alloc[j] < 1:
        raise EmptyBufferError(f"server {j} has no slot to move")

    moved = alloc.unit_shift(i, j)
    if table is None:
        table = NormTable.build(params, alloc.with_length(i, alloc[i] + 1).ell)
    log_after, log_before = table.log_g(moved), table.log_g(alloc)
    gap = log_after - log_before

    if abs(gap) < NEAR_TIE_TOLERANCE:
        logger.warning(f"near tie moving a slot {j}->{i} at {alloc.ell}, reported as 0")
        return DeltaG(sign=0, log_abs=-math.inf, near_tie=True, method="subtraction")

    if params.n_servers == 2 and abs(gap) < COEFFICIENT_SWITCH:
        if (i, j) == (0, 1):
            value = delta_g_coefficients(params, alloc).evaluate(params.lam)
        else:
            value = -delta_g_coefficients(params, moved).evaluate(params.lam)
        if value != 0.0:
            return DeltaG(
                sign=1 if value > 0 else -1,
                log_abs=math.log(abs(value)),
                near_tie=False,
                method="coefficients",
            )

    return DeltaG(
        sign=1 if gap > 0 else -1,
        log_abs=log_before + math.log(abs(math.expm1(gap))),
        near_tie=False,
        method="subtraction",
    )


def _rational(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10**9)


def remark_one_tie(mu: Sequence[float], total_slots: int) -> bool:
    """True when the two low-traffic endpoints ceil(p1 L - p2) and floor(p1 L + p1)
    differ, i.e. when p1 (L + 1) is an integer, p1 = mu_1 / sum(mu)."""
    if len(mu) != 2:
        raise NotTwoServersError(f"two service rates expected, got {len(mu)}")
    mu1, mu2 = sorted((_rational(m) for m in mu), reverse=True)
    scaled = mu1 / (mu1 + mu2) * (total_slots + 1)
    return scaled.denominator == 1
