from __future__ import annotations

import functools
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

import click
import pydantic
from pydantic import BaseModel

from slotlime import __version__
from slotlime.model.errors import SlotlimeError
from slotlime.tools.click import ClickTools
from slotlime.tools.writers import TablePrinter, write_csv, write_json

SHARED_OPTIONS = ("format", "out", "seed", "threads", "progress")


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    TABLE = "table"


class RunSpec(BaseModel):
    """Everything a command run depends on, echoed in JSON output under ``run``."""

    command: str
    format: OutputFormat = OutputFormat.CSV
    out: Optional[str] = None
    seed: int = 0
    threads: int = 0
    options: Dict[str, Any] = {}
    version: str = __version__

    @pydantic.validator("seed")
    def _u64(cls, v):
        if not 0 <= v < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return v

    @classmethod
    def from_params(cls, command: str, params: Dict[str, Any]) -> RunSpec:
        shared = {k: params[k] for k in SHARED_OPTIONS if k in params}
        shared.pop("progress", None)
        options = {k: v for k, v in params.items() if k not in SHARED_OPTIONS}
        return cls(command=command, options=options, **shared)


@dataclass
class CommandOutput:
    header: Sequence[str]
    rows: List[Sequence[Any]]
    payload: Dict[str, Any] = field(default_factory=dict)
    title: Optional[str] = None


class SlotlimeUsageError(click.ClickException):
    """Library or validation error, reported in one line with exit code 2."""

    exit_code = 2


def _one_line(error: Exception) -> str:
    return "; ".join(line.strip() for line in str(error).splitlines() if line.strip())


def report_errors(func: Callable) -> Callable:
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (SlotlimeError, pydantic.ValidationError) as e:
            raise SlotlimeUsageError(f"{type(e).__name__}: {_one_line(e)}")

    return wrapper


def common_options(default_format: OutputFormat = OutputFormat.CSV) -> Callable:
    return ClickTools.apply_options(
        [
            click.option(
                "--config",
                type=click.Path(exists=True, dir_okay=False),
                is_eager=True,
                expose_value=False,
                callback=ClickTools.load_config,
                help="YAML/JSON file with option values, command line options win",
            ),
            click.option(
                "--format",
                "format",
                type=click.Choice([f.value for f in OutputFormat]),
                default=default_format.value,
                show_default=True,
                help="Output format",
            ),
            click.option(
                "--out",
                type=click.Path(dir_okay=False, writable=True),
                default=None,
                help="Output file, stdout when missing",
            ),
            click.option(
                "--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True
            ),
            click.option(
                "--threads",
                type=click.IntRange(min=-1),
                default=0,
                show_default=True,
                help="Worker processes, -1 for one per core, 0 in-process",
            ),
            click.option("--progress", is_flag=True, help="Show progress bars on stderr"),
        ]
    )


def emit(spec: RunSpec, output: CommandOutput) -> None:
    """Writes the command output to ``spec.out`` (or stdout) in ``spec.format``."""
    with click.open_file(spec.out or "-", "w", encoding="utf-8") as stream:
        if spec.format == OutputFormat.CSV:
            write_csv(stream, output.header, output.rows)
        elif spec.format == OutputFormat.JSON:
            write_json(stream, {"run": spec.dict(), **output.payload})
        else:
            printer = TablePrinter(stream if spec.out else None)
            printer.print(output.header, output.rows, title=output.title)


def server_labels(prefix: str, n: int) -> List[str]:
    return [f"{prefix}{i + 1}" for i in range(n)]
