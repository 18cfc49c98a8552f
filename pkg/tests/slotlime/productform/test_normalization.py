import math

import numpy as np
import pytest

from slotlime.model import Allocation, CapacityExceededError, ClusterParams, NonPositiveRateError
from slotlime.productform import NormTable, norm_const, norm_const_direct, simplex_table


class TestNormConst:
    @pytest.mark.parametrize(
        "lam,mu,ell,expected",
        [
            (0.6, (0.6, 0.4), (1, 0), 2.0),
            (1.0, (0.6, 0.4), (1, 1), 2.48),
            (1.0, (0.6, 0.4), (0, 0), 1.0),
        ],
    )
    def test_hand_values(self, lam, mu, ell, expected):
        params = ClusterParams(lam=lam, mu=mu)
        alloc = params.allocation(ell)
        assert norm_const(params, alloc).g(alloc) == pytest.approx(expected, rel=1e-12)
        assert math.exp(norm_const_direct(params, alloc)) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize(
        "lam,mu,ell",
        [
            (1.0, (0.5, 0.3, 0.2), (1, 1, 1)),
            (0.3, (0.5, 0.3, 0.2), (3, 2, 4)),
            (7.0, (0.45, 0.3, 0.2, 0.05), (3, 1, 2, 2)),
            (0.05, (0.9, 0.1), (6, 5)),
        ],
    )
    def test_against_rational_sum(self, exact_g, lam, mu, ell):
        params = ClusterParams(lam=lam, mu=mu)
        alloc = Allocation(ell)
        table = norm_const(params, alloc)
        expected = math.log(exact_g(lam, params.mu, ell))
        assert table.log_g(alloc) == pytest.approx(expected, rel=1e-12)
        assert norm_const_direct(params, alloc) == pytest.approx(expected, rel=1e-12)

    def test_every_sub_allocation(self, exact_g):
        params = ClusterParams(lam=0.8, mu=(0.7, 0.3))
        table = norm_const(params, Allocation((3, 2)))
        for k in table.lattice.states.tolist():
            assert table.g(k) == pytest.approx(float(exact_g(0.8, params.mu, k)), rel=1e-12)

    def test_large_allocation_does_not_overflow(self):
        params = ClusterParams(lam=1e-3, mu=(0.75, 0.25))
        table = norm_const(params, Allocation((300, 300)))
        value = table.log_g((300, 300))
        assert math.isfinite(value) and value > 0
        assert np.all(np.isfinite(table.log_values))

    def test_direct_sum_cap(self):
        params = ClusterParams(lam=1.0, mu=(0.6, 0.4))
        with pytest.raises(CapacityExceededError):
            norm_const_direct(params, Allocation((20, 20)))

    def test_invalid_instance(self):
        with pytest.raises(NonPositiveRateError):
            norm_const(ClusterParams(lam=0.0, mu=(0.6, 0.4)), Allocation((1, 1)))


class TestSimplexTable:
    def test_matches_box_tables(self):
        params = ClusterParams(lam=1.3, mu=(0.5, 0.3, 0.2))
        table = simplex_table(params, 6)
        for ell in Allocation.compositions(6, 3).tolist():
            box = norm_const(params, Allocation(ell))
            assert table.log_g(ell) == pytest.approx(box.log_g(ell), rel=1e-12)

    def test_partial_sums(self, exact_g):
        params = ClusterParams(lam=1.0, mu=(0.6, 0.4))
        table = NormTable.build(params, (2, 2))
        index = table.lattice.index((2, 2))
        sums = np.exp(table.log_partial_sums[index])
        expected_first = sum(float(exact_g(1.0, params.mu, (m, 2))) for m in range(2))
        expected_second = sum(float(exact_g(1.0, params.mu, (2, m))) for m in range(2))
        assert sums == pytest.approx([expected_first, expected_second], rel=1e-12)
        assert np.isneginf(table.log_partial_sums[table.lattice.index((0, 0))]).all()
