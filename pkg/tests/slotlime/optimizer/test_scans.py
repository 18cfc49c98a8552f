import numpy as np
import pytest

from slotlime.model import Allocation, ClusterParams, InvalidGridError, PreconditionError
from slotlime.optimizer import (
    Metric,
    ScanReport,
    ScanRow,
    conjecture_scan,
    monotonicity_scan,
    optimize_grid,
)


def _log_grid(low, high, points):
    return [float(v) for v in np.logspace(np.log10(low), np.log10(high), points)]


class TestMonotonicityScan:
    @pytest.mark.parametrize("mu1", [0.6, 0.75, 0.9])
    def test_fast_buffer_non_increasing(self, mu1):
        mu = (mu1, round(1 - mu1, 10))
        report = monotonicity_scan(mu, 20, _log_grid(0.25, 5.0, 25))
        assert report.asserted
        assert report.passed
        assert not report.violations
        lengths = [row.allocation[0] for row in report.rows]
        assert all(b <= a for a, b in zip(lengths, lengths[1:]))
        assert 10 <= lengths[-1] <= lengths[0] <= 18

    def test_four_servers(self, four_server_rates):
        grid = [float(v) for v in np.linspace(0.1, 7.0, 15)]
        report = monotonicity_scan(four_server_rates, 40, grid)
        assert report.passed
        assert report.rows[0].allocation.ell == (18, 12, 8, 2)
        last = report.rows[-1].allocation.ell
        assert last[0] > 10 > last[3]
        assert list(last) == sorted(last, reverse=True)

    def test_response_time_is_not_asserted(self):
        report = monotonicity_scan((0.75, 0.25), 10, [0.5, 1.0, 2.0], Metric.RESPONSE_TIME)
        assert not report.asserted
        assert report.passed

    def test_user_rows(self):
        report = monotonicity_scan((0.1, 0.9), 20, [1e-4, 2.0])
        rows = [ell for _, ell, _, _ in report.user_rows()]
        assert rows[0] == [2, 18]
        assert 2 <= rows[1][0] <= 10 <= rows[1][1] <= 18

    @pytest.mark.parametrize("grid", [[1.0], [1.0, 1.0], [2.0, 1.0], [0.0, 1.0], []])
    def test_invalid_grid(self, grid):
        with pytest.raises(InvalidGridError):
            monotonicity_scan((0.6, 0.4), 10, grid)

    def test_workers_do_not_change_results(self):
        grid = [0.2, 0.7, 1.5, 3.0]
        serial = optimize_grid((0.5, 0.3, 0.2), 9, grid)
        pooled = optimize_grid((0.5, 0.3, 0.2), 9, grid, workers=2)
        assert [r.canonical for r in serial] == [r.canonical for r in pooled]
        assert [r.best_value for r in serial] == [r.best_value for r in pooled]


class TestConjectureScan:
    def test_prefix_sums(self, four_server_rates):
        grid = [float(v) for v in np.linspace(0.1, 7.0, 12)]
        report = conjecture_scan(four_server_rates, 40, grid)
        assert report.passed
        assert report.prefixes == {1: True, 2: True, 3: True}
        assert not report.failures

    def test_two_servers_rejected(self):
        with pytest.raises(PreconditionError):
            conjecture_scan((0.6, 0.4), 10, [0.5, 1.0])

    def test_failures_are_reported(self, monkeypatch):
        params = ClusterParams(lam=1.0, mu=(0.5, 0.3, 0.2))
        rows = (
            ScanRow(1.0, Allocation((2, 2, 2)), 0.1, 1),
            ScanRow(2.0, Allocation((3, 1, 2)), 0.2, 1),
        )

        def fake_scan(*args, **kwargs):
            return ScanReport(params, 6, Metric.LOSS, rows, (), True)

        monkeypatch.setattr("slotlime.optimizer.scans.monotonicity_scan", fake_scan)
        report = conjecture_scan((0.5, 0.3, 0.2), 6, [1.0, 2.0])
        assert not report.passed
        assert report.prefixes == {1: False, 2: True}
        assert [(f.n, f.lam_prev, f.lam_next) for f in report.failures] == [(1, 1.0, 2.0)]
        assert report.to_dict()["failures"] == [{"n": 1, "lambda_prev": 1.0, "lambda_next": 2.0}]
