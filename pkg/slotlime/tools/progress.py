from typing import Callable, Iterable, Optional, Sized, TypeVar

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

T = TypeVar("T")
StepCallback = Callable[[dict], None]


class StepProgress(Progress):
    """A rich ``Progress`` that refreshes on every step, never from a background thread,
    and forwards each step to ``on_step``."""

    def __init__(self, on_step: Optional[StepCallback] = None, **kwargs) -> None:
        kwargs.setdefault("console", Console(stderr=True))
        super().__init__(
            TextColumn("⏳ {task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            auto_refresh=False,
            **kwargs,
        )
        self._on_step = on_step

    def steps(self, values: Iterable[T], total: int, description: str) -> Iterable[T]:
        task = self.add_task(description, total=total)
        for value in values:
            yield value
            if self._on_step is not None:
                self._on_step({"task_id": task, "advance": 1, "total": total})
            self.advance(task)
            self.refresh()


def slotlime_track(
    sequence: Iterable[T],
    description: str = "Working...",
    total: Optional[int] = None,
    console: Optional[Console] = None,
    transient: bool = True,
    disable: bool = False,
    track_callback: Optional[StepCallback] = None,
) -> Iterable[T]:
    """Yields the values of ``sequence`` while drawing a progress bar on stderr, so stdout
    only carries command output.

    Args:
        sequence (Iterable[T]): values to iterate over
        description (str, optional): label of the bar. Defaults to "Working...".
        total (int, optional): number of steps, required when ``sequence`` has no length.
        console (Console, optional): target console. Defaults to a stderr console.
        transient (bool, optional): remove the bar once done. Defaults to True.
        disable (bool, optional): hide the bar, values and callbacks still flow.
        track_callback (Callable[[dict], None], optional): receives
            ``{"task_id", "advance", "total"}`` after every step.

    Raises:
        ValueError: if ``total`` is missing and ``sequence`` is not sized
    """
    if total is None:
        if not isinstance(sequence, Sized):
            raise ValueError(f"{sequence!r} has no length, pass 'total'")
        total = len(sequence)

    options = {"transient": transient, "disable": disable}
    if console is not None:
        options["console"] = console
    with StepProgress(on_step=track_callback, **options) as progress:
        yield from progress.steps(sequence, int(total), description)
