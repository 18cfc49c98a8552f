import io
import json
import math
from enum import Enum

import numpy as np
import pytest

from slotlime.tools.parallel import ordered_map
from slotlime.tools.progress import slotlime_track
from slotlime.tools.writers import TablePrinter, format_cell, json_ready, write_csv, write_json


class Color(Enum):
    RED = "red"


@pytest.mark.parametrize(
    "value, expected",
    [
        (None, ""),
        (True, "true"),
        (np.bool_(False), "false"),
        (np.int64(7), "7"),
        (1 / 2.48, "0.403225806452"),
        (0.5, "0.5"),
        (1e-4, "0.0001"),
        (math.inf, "inf"),
        ("loss", "loss"),
    ],
)
def test_format_cell(value, expected):
    assert format_cell(value) == expected


def test_json_ready():
    payload = {"b": (1, np.float64(0.5)), "a": [math.nan, Color.RED], 3: np.arange(2)}
    assert json_ready(payload) == {"b": [1, 0.5], "a": [None, "red"], "3": [0, 1]}
    assert list(json_ready(payload)) == ["b", "a", "3"]


def test_write_csv():
    stream = io.StringIO()
    write_csv(stream, ("lambda", "l1", "loss"), [(1.0, 2, 1 / 3), (2.0, 0, None)])
    assert stream.getvalue() == "lambda,l1,loss\n1,2,0.333333333333\n2,0,\n"


def test_write_json():
    stream = io.StringIO()
    write_json(stream, {"loss": math.inf, "ell": (1, 1)})
    assert stream.getvalue().endswith("}\n")
    assert json.loads(stream.getvalue()) == {"loss": None, "ell": [1, 1]}


def test_table_printer():
    stream = io.StringIO()
    TablePrinter(stream).print(("metric", "value"), [("loss", 0.25)], title="analysis")
    text = stream.getvalue()
    assert "analysis" in text
    assert "0.25" in text


def _square(x):
    return x * x


class TestOrderedMap:
    @pytest.mark.parametrize("workers", [0, 2])
    def test_order_is_kept(self, workers):
        assert ordered_map(_square, range(10), workers=workers) == [x * x for x in range(10)]

    def test_progress_callback(self):
        steps = []
        ordered_map(_square, [1, 2, 3], progress_callback=steps.append)
        assert [s["advance"] for s in steps] == [1, 1, 1]
        assert all(s["total"] == 3 for s in steps)


def test_track_needs_total_for_generators():
    with pytest.raises(ValueError):
        list(slotlime_track((x for x in range(3)), disable=True))
    assert list(slotlime_track((x for x in range(3)), total=3, disable=True)) == [0, 1, 2]
