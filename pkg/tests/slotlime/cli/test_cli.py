import csv
import io
import json

import pytest


def _csv(text):
    return list(csv.reader(io.StringIO(text)))


class TestGroup:
    def test_help_lists_commands(self, cli_runner):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(slotlime, ["--help"])
        assert result.exit_code == 0
        for name in ("analyze", "optimize", "sweep", "simulate", "verify", "figures"):
            assert name in result.stdout

    def test_version(self, cli_runner):
        from slotlime import __version__
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(slotlime, ["--version"])
        assert __version__ in result.stdout


class TestAnalyze:
    def test_hand_instance(self, cli_runner):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(
            slotlime, ["analyze", "--lambda", "1", "--mu", "0.6,0.4", "--ell", "1,1"]
        )
        assert result.exit_code == 0, result.stderr
        header, row = _csv(result.stdout)
        assert header == [
            "lambda",
            "loss",
            "rho1",
            "rho2",
            "alpha1",
            "alpha2",
            "mean_response_time",
            "throughput",
            "log_norm_const",
        ]
        assert row[:2] == ["1", "0.403225806452"]

    def test_single_slot(self, cli_runner):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(
            slotlime, ["analyze", "--lambda", "0.6", "--mu", "0.6,0.4", "--ell", "1,0"]
        )
        assert result.exit_code == 0, result.stderr
        row = _csv(result.stdout)[1]
        assert float(row[1]) == pytest.approx(0.5)
        assert row[3] == "0"

    def test_json(self, cli_runner):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(
            slotlime,
            ["analyze", "--lambda", "1", "--mu", "0.6,0.4", "--ell", "1,1", "--format", "json"],
        )
        data = json.loads(result.stdout)
        assert data["run"]["command"] == "analyze"
        assert data["run"]["seed"] == 0
        assert data["metrics"]["loss"] == pytest.approx(1 / 2.48)
        assert data["ell"] == [1, 1]

    @pytest.mark.parametrize(
        "args",
        [
            ["--lambda", "1", "--mu", "0.6,0.4"],
            ["--lambda", "-1", "--mu", "0.6,0.4", "--ell", "1,1"],
            ["--lambda", "1", "--mu", "0.6,0", "--ell", "1,1"],
            ["--lambda", "1", "--mu", "0.6,0.4", "--ell", "1,-1"],
            ["--lambda", "1", "--mu", "0.6,0.4", "--ell", "1,1,1"],
            ["--lambda", "1", "--mu", "", "--ell", "1,1"],
        ],
    )
    def test_usage_errors(self, cli_runner, args):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(slotlime, ["analyze", *args])
        assert result.exit_code == 2
        assert result.stdout == ""
        assert "Traceback" not in result.stderr

    def test_out_file(self, cli_runner, tmp_path):
        from slotlime.cli.main import slotlime

        out = tmp_path / "metrics.csv"
        args = ["analyze", "--lambda", "1", "--mu", "0.6,0.4", "--ell", "1,1", "--out", str(out)]
        result = cli_runner.invoke(slotlime, args)
        assert result.exit_code == 0
        assert result.stdout == ""
        assert _csv(out.read_text())[1][1] == "0.403225806452"

    def test_table(self, cli_runner):
        from slotlime.cli.main import slotlime

        args = ["analyze", "--lambda", "1", "--mu", "0.6,0.4", "--ell", "1,1", "--format", "table"]
        result = cli_runner.invoke(slotlime, args)
        assert result.exit_code == 0
        assert "metrics" in result.stdout
        assert "loss" in result.stdout


class TestOptimize:
    def test_heavy_traffic(self, cli_runner):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(
            slotlime, ["optimize", "--lambda", "100", "--mu", "0.55,0.45", "-L", "6"]
        )
        assert result.exit_code == 0, result.stderr
        header, row = _csv(result.stdout)
        assert header == ["lambda", "l1", "l2", "best_value", "ties"]
        assert row[1:3] == ["3", "3"]
        assert row[4] == "1"

    def test_skewed_heavy_traffic(self, cli_runner):
        from slotlime.cli.main import slotlime

        args = ["optimize", "--lambda", "100", "--mu", "0.9,0.1", "-L", "20", "--format", "json"]
        result = cli_runner.invoke(slotlime, args)
        assert result.exit_code == 0, result.stderr
        data = json.loads(result.stdout)["result"]
        assert data["canonical"] == [12, 8]
        assert data["ties"] == 1
        assert data["near_ties"] > 1

    def test_user_order(self, cli_runner):
        from slotlime.cli.main import slotlime

        args = ["optimize", "--lambda", "1e-4", "--mu", "0.1,0.9", "-L", "20", "--format", "json"]
        result = cli_runner.invoke(slotlime, args)
        data = json.loads(result.stdout)
        assert data["result"]["canonical"] == [2, 18]

    def test_config_file(self, cli_runner, tmp_path):
        from slotlime.cli.main import slotlime

        cfg = tmp_path / "optimize.yml"
        cfg.write_text("lambda: 100\nmu: [0.75, 0.25]\ntotal-slots: 20\nmetric: loss\n")
        result = cli_runner.invoke(
            slotlime, ["optimize", "--config", str(cfg), "--lambda", "1e-4", "--format", "json"]
        )
        assert result.exit_code == 0, result.stderr
        data = json.loads(result.stdout)
        assert data["run"]["options"]["lam"] == 1e-4
        assert data["result"]["canonical"] == [15, 5]

    def test_config_only(self, cli_runner, tmp_path):
        from slotlime.cli.main import slotlime

        cfg = tmp_path / "optimize.yml"
        cfg.write_text("lambda: 1.0e-4\nmu: [0.75, 0.25]\ntotal-slots: 20\n")
        result = cli_runner.invoke(slotlime, ["optimize", "--config", str(cfg)])
        assert result.exit_code == 0, result.stderr
        assert _csv(result.stdout)[1][1:3] == ["15", "5"]


class TestSweep:
    def test_rows_per_cluster(self, cli_runner):
        from slotlime.cli.main import slotlime

        args = ["sweep", "--mu", "0.6,0.4", "--mu", "0.9,0.1", "-L", "10"]
        result = cli_runner.invoke(slotlime, [*args, "--lambda-grid", "0.5,1,2"])
        assert result.exit_code == 0, result.stderr
        rows = _csv(result.stdout)
        assert rows[0] == ["mu1", "mu2", "lambda", "l1", "l2", "best_value", "ties"]
        assert len(rows) == 1 + 2 * 3
        fast = [int(r[3]) for r in rows[1:4]]
        assert all(b <= a for a, b in zip(fast, fast[1:]))

    @pytest.mark.parametrize(
        "grid", [["--lambda-grid", ""], ["--lambda-grid", "2,1"], ["--points", "0"]]
    )
    def test_invalid_grid(self, cli_runner, grid):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(slotlime, ["sweep", "--mu", "0.6,0.4", "-L", "10", *grid])
        assert result.exit_code == 2

    def test_mismatched_clusters(self, cli_runner):
        from slotlime.cli.main import slotlime

        args = ["sweep", "--mu", "0.6,0.4", "--mu", "0.5,0.3,0.2", "-L", "6", "--points", "2"]
        result = cli_runner.invoke(slotlime, args)
        assert result.exit_code == 2
        assert "DimensionMismatchError" in result.stderr


class TestSimulate:
    ARGS = [
        "simulate",
        "--lambda",
        "1",
        "--mu",
        "0.6,0.4",
        "--ell",
        "1,1",
        "--arrivals",
        "3000",
        "--replications",
        "3",
        "--seed",
        "42",
    ]

    def test_deterministic_output(self, cli_runner):
        from slotlime.cli.main import slotlime

        first = cli_runner.invoke(slotlime, self.ARGS)
        second = cli_runner.invoke(slotlime, self.ARGS)
        assert first.exit_code == 0, first.stderr
        assert first.stdout == second.stdout
        rows = _csv(first.stdout)
        assert rows[0][:4] == ["metric", "mean", "half_width", "analytic"]
        assert rows[1][0] == "loss"

    def test_seed_changes_output(self, cli_runner):
        from slotlime.cli.main import slotlime

        first = cli_runner.invoke(slotlime, self.ARGS)
        other = cli_runner.invoke(slotlime, [*self.ARGS[:-1], "43"])
        assert first.stdout != other.stdout

    def test_fcfs_has_no_insensitivity_check(self, cli_runner):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(slotlime, [*self.ARGS, "--scheduler", "fcfs", "--insensitivity"])
        assert result.exit_code == 2
        assert "SchedulerNotPSError" in result.stderr

    def test_bad_replications(self, cli_runner):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(slotlime, [*self.ARGS, "--replications", "1"])
        assert result.exit_code == 2


class TestVerify:
    SMALL = ["verify", "productform", "--max-states", "200", "--instances", "6"]

    def test_productform(self, cli_runner):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(slotlime, self.SMALL)
        assert result.exit_code == 0, result.stderr
        data = json.loads(result.stdout)
        assert data["report"]["passed"]
        assert data["report"]["checks"] == 6

    def test_injected_bug(self, cli_runner, monkeypatch):
        from slotlime.cli.main import slotlime
        from slotlime.model.cluster import ClusterParams
        from slotlime.oracle import generator, solvers

        def reversed_rates(params, alloc, max_states=None):
            flipped = ClusterParams(
                lam=params.lam, mu=tuple(reversed(params.mu)), order=params.order
            )
            return generator.build_generator(flipped, alloc, max_states=max_states)

        monkeypatch.setattr(solvers, "build_generator", reversed_rates)
        result = cli_runner.invoke(slotlime, [*self.SMALL, "--format", "csv"])
        assert result.exit_code == 1
        assert _csv(result.stdout)[1][:2] == ["productform", "false"]

    def test_conjecture(self, cli_runner):
        from slotlime.cli.main import slotlime

        args = ["verify", "conjecture", "--lambda-grid", "0.1,1,3,7"]
        result = cli_runner.invoke(slotlime, args)
        assert result.exit_code == 0, result.stderr
        last = json.loads(result.stdout)["report"]["details"]["rows"][-1]
        assert last[0] == 7
        assert sum(last[1:]) == 40

    def test_propositions(self, cli_runner):
        from slotlime.cli.main import slotlime

        args = ["verify", "propositions", "--L", "5", "--mu1-grid", "0.7", "--points", "8"]
        result = cli_runner.invoke(slotlime, [*args, "--format", "csv"])
        assert result.exit_code == 0, result.stderr
        assert _csv(result.stdout)[1][1] == "true"

    def test_unknown_suite(self, cli_runner):
        from slotlime.cli.main import slotlime

        assert cli_runner.invoke(slotlime, ["verify", "everything"]).exit_code == 2


class TestFigures:
    def test_small_figure(self, cli_runner):
        from slotlime.cli.main import slotlime

        result = cli_runner.invoke(slotlime, ["figures", "7", "--points", "2", "--format", "json"])
        assert result.exit_code == 0, result.stderr
        data = json.loads(result.stdout)
        assert data["figure"] == "figure7"
        assert data["header"] == ["lambda", "l1", "l2", "l3", "l4"]
        assert data["rows"][-1][0] == 7
        assert data["rows"][-1][1] > 10 > data["rows"][-1][4]

    @pytest.mark.parametrize("args", [["9"], ["3", "--points", "0"], ["3", "--lambda-max", "0"]])
    def test_invalid(self, cli_runner, args):
        from slotlime.cli.main import slotlime

        assert cli_runner.invoke(slotlime, ["figures", *args]).exit_code == 2
