import csv
import json
import math
from enum import Enum
from typing import IO, Any, Iterable, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.table import Table

FLOAT_FORMAT = ".12g"


def format_cell(value: Any) -> str:
    """CSV text of a value: floats at 12 significant digits, None as an empty cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def json_ready(value: Any) -> Any:
    """Plain JSON types; non-finite floats become None, key order is kept."""
    if isinstance(value, dict):
        return {str(k): json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [json_ready(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_csv(stream: IO[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])


def write_json(stream: IO[str], payload: Any) -> None:
    json.dump(json_ready(payload), stream, indent=2, sort_keys=False, allow_nan=False)
    stream.write("\n")


class TablePrinter:
    TITLE_STYLE = "bold bright_blue"
    HEADER_STYLE = "bold magenta"

    def __init__(self, stream: Optional[IO[str]] = None):
        self._console = Console(file=stream) if stream is not None else Console()

    def print(
        self, header: Sequence[str], rows: Iterable[Sequence[Any]], title: Optional[str] = None
    ) -> None:
        table = Table(title=title, title_style=self.TITLE_STYLE, header_style=self.HEADER_STYLE)
        for name in header:
            table.add_column(str(name), justify="right")
        for row in rows:
            table.add_row(*[format_cell(v) for v in row])
        self._console.print(table)
