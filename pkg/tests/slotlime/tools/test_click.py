from types import SimpleNamespace

import click
import pytest
from deepdiff import DeepDiff

from slotlime.tools.click import ClickTools


class TestClickTools:
    @pytest.mark.parametrize(
        "value, expected",
        [
            ("0.6,0.4", [0.6, 0.4]),
            ("[0.6, 0.4]", [0.6, 0.4]),
            (" 1e-4 ", [1e-4]),
            ([0.5, "0.25"], [0.5, 0.25]),
            (None, None),
        ],
    )
    def test_parse_float_list(self, value, expected):
        assert ClickTools.parse_float_list(None, None, value) == expected

    @pytest.mark.parametrize("value", ["", ",", "0.6,abc"])
    def test_bad_float_list(self, value):
        with pytest.raises(click.BadParameter):
            ClickTools.parse_float_list(None, None, value)

    def test_parse_int_list(self):
        assert ClickTools.parse_int_list(None, None, "12, 8") == [12, 8]
        with pytest.raises(click.BadParameter):
            ClickTools.parse_int_list(None, None, "1.5,2")

    def test_load_config(self, tmp_path):
        cfg = tmp_path / "run.yml"
        cfg.write_text("mu: [0.75, 0.25]\ntotal-slots: 20\nmetric: loss\n")

        ctx = SimpleNamespace(default_map={"metric": "response_time"}, resilient_parsing=False)
        ClickTools.load_config(ctx, None, str(cfg))
        expected = {"mu": "0.75,0.25", "total_slots": 20, "metric": "loss"}
        assert not DeepDiff(expected, ctx.default_map)

    def test_load_config_option_aliases(self, tmp_path):
        cfg = tmp_path / "run.yml"
        cfg.write_text("lambda: 2.5\nL: 8\n")

        command = click.Command(
            "run",
            params=[
                click.Option(["--lambda", "lam"], type=float),
                click.Option(["--total-slots", "-L"], type=int),
            ],
        )
        ctx = click.Context(command)
        ClickTools.load_config(ctx, None, str(cfg))
        assert ctx.default_map == {"lam": 2.5, "total_slots": 8}

    def test_load_config_without_file(self):
        ctx = SimpleNamespace(default_map=None, resilient_parsing=False)
        ClickTools.load_config(ctx, None, None)
        assert ctx.default_map is None

    def test_apply_options(self):
        @click.command()
        @ClickTools.apply_options(
            [click.option("--first", default=1), click.option("--second", default=2)]
        )
        def command(first, second):
            pass

        assert [p.name for p in command.params] == ["first", "second"]
