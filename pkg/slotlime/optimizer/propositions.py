from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger

from slotlime.model.cluster import Allocation, ClusterParams
from slotlime.model.errors import NotTwoServersError
from slotlime.optimizer.scans import check_grid
from slotlime.productform.deltas import (
    ALL_POSITIVE,
    NEAR_TIE_TOLERANCE,
    UNCLASSIFIED,
    delta_g_coefficients,
)
from slotlime.productform.normalization import simplex_table
from slotlime.tools.progress import slotlime_track

RECONSTRUCTION_LAMBDAS = (0.1, 1.0, 10.0)
RECONSTRUCTION_TOLERANCE = 1e-10
CANCELLATION_FLOOR = 1e-4


def loss_shift_violations(
    log_losses: Sequence[float], tolerance: float = NEAR_TIE_TOLERANCE
) -> List[int]:
    """Positions x where log beta(l - (x+1) e1 + (x+1) e2) is below log beta(l - x e1 + x e2)
    by more than ``tolerance``: moving slots to the slow server lowered the loss."""
    return [
        x
        for x in range(len(log_losses) - 1)
        if log_losses[x + 1] - log_losses[x] < -tolerance
    ]


def delta_sign_violations(
    lambdas: Sequence[float], signs: Sequence[int]
) -> List[Tuple[float, float]]:
    """Pairs (lambda*, lambda) with lambda < lambda*, delta G(lambda*) > 0 and delta G(lambda) < 0.

    ``signs`` are the delta G signs along the increasing grid; zeros are near ties.
    """
    positive = [k for k, s in enumerate(signs) if s > 0]
    if not positive:
        return []
    last = positive[-1]
    return [(lambdas[last], lambdas[k]) for k in range(last) if signs[k] < 0]


def exact_delta_g(mu: Sequence[float], lam: float, ell: Tuple[int, int]) -> Fraction:
    """G(l + e1 - e2) - G(l) in rational arithmetic, from the explicit sums."""
    r1, r2 = (Fraction(m) / Fraction(lam) for m in mu)

    def g(l1: int, l2: int) -> Fraction:
        return sum(
            comb(x1 + x2, x1) * r1**x1 * r2**x2
            for x1 in range(l1 + 1)
            for x2 in range(l2 + 1)
        )

    l1, l2 = ell
    return g(l1 + 1, l2 - 1) - g(l1, l2)


@dataclass(frozen=True)
class PropositionReport:
    mu: Tuple[float, float]
    max_total: int
    lambdas: Tuple[float, ...]
    shift_checked: int
    shift_violations: Tuple[Dict, ...]
    sign_checked: int
    sign_violations: Tuple[Dict, ...]
    coefficient_checked: int
    pattern_failures: Tuple[Dict, ...]
    max_reconstruction_error: float

    @property
    def passed(self) -> bool:
        return (
            not (self.shift_violations or self.sign_violations or self.pattern_failures)
            and self.max_reconstruction_error <= RECONSTRUCTION_TOLERANCE
        )


def proposition_checks(
    mu: Sequence[float],
    max_total: int,
    lambda_grid: Sequence[float],
    reconstruction_lambdas: Sequence[float] = RECONSTRUCTION_LAMBDAS,
    progress: bool = False,
) -> PropositionReport:
    """Exhaustive checks over every two-server allocation with 1 <= L <= ``max_total``
    and ``l2 >= 1`` (allocations with ``l2 = 0`` are skipped):

    - when moving a slot to the fast server does not increase the loss, moving more
      and more slots to the slow server strictly increases it;
    - when delta G(lambda*, l) > 0, delta G(lambda, l) > 0 for all smaller grid rates;
    - the coefficient expansion of delta G fits one sign pattern (all positive when
      l1 + 1 <= l2) and reproduces the exact delta G.

    Raises:
        NotTwoServersError: for anything but two rates
        InvalidGridError: if the grid is not positive and strictly increasing
    """
    if len(mu) != 2:
        raise NotTwoServersError(f"two service rates expected, got {len(mu)}")
    grid = check_grid(lambda_grid)
    base = ClusterParams(lam=1.0, mu=tuple(mu))

    allocations = [
        (l1, total - l1) for total in range(1, max_total + 1) for l1 in range(total)
    ]
    signs: Dict[Tuple[int, int], List[int]] = {ell: [] for ell in allocations}
    shift_checked, shift_violations = 0, []

    for lam in slotlime_track(grid, description="propositions", disable=not progress):
        table = simplex_table(base.with_lambda(lam), max_total)
        log_g = dict(zip(map(tuple, table.lattice.states.tolist()), table.log_values.tolist()))
        for l1, l2 in allocations:
            gap = log_g[(l1 + 1, l2 - 1)] - log_g[(l1, l2)]
            signs[(l1, l2)].append(0 if abs(gap) < NEAR_TIE_TOLERANCE else (1 if gap > 0 else -1))
            if gap < -NEAR_TIE_TOLERANCE:
                continue
            shift_checked += 1
            log_losses = [-log_g[(l1 - x, l2 + x)] for x in range(l1 + 1)]
            for x in loss_shift_violations(log_losses):
                shift_violations.append({"lambda": lam, "ell": [l1, l2], "x": x})

    sign_violations = []
    for ell, seq in signs.items():
        for lam_star, lam in delta_sign_violations(grid, seq):
            sign_violations.append({"ell": list(ell), "lambda_star": lam_star, "lambda": lam})

    pattern_failures = []
    max_error = 0.0
    for l1, l2 in allocations:
        coeffs = delta_g_coefficients(base, Allocation((l1, l2)))
        if coeffs.pattern == UNCLASSIFIED:
            pattern_failures.append({"ell": [l1, l2], "reason": "unclassified"})
        elif l1 + 1 <= l2 and coeffs.pattern != ALL_POSITIVE:
            pattern_failures.append({"ell": [l1, l2], "reason": coeffs.pattern})
        for lam in reconstruction_lambdas:
            exact = float(exact_delta_g(base.mu, lam, (l1, l2)))
            approx = coeffs.evaluate(lam)
            # heavy cancellation between terms is measured against the terms themselves
            terms = sum(abs(c) * lam ** -(coeffs.n_min + k) for k, c in enumerate(coeffs.c))
            scale = max(abs(exact), CANCELLATION_FLOOR * terms, np.finfo(float).tiny)
            max_error = max(max_error, abs(approx - exact) / scale)

    report = PropositionReport(
        mu=tuple(base.mu),
        max_total=max_total,
        lambdas=tuple(grid),
        shift_checked=shift_checked,
        shift_violations=tuple(shift_violations),
        sign_checked=len(allocations),
        sign_violations=tuple(sign_violations),
        coefficient_checked=len(allocations),
        pattern_failures=tuple(pattern_failures),
        max_reconstruction_error=max_error,
    )
    logger.info(
        f"propositions for mu={report.mu}: {shift_checked} shift checks, "
        f"{len(allocations)} allocations, passed={report.passed}"
    )
    return report
