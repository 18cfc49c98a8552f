import multiprocessing
from typing import Callable, List, Optional, Sequence, TypeVar

from loguru import logger

from slotlime.tools.progress import slotlime_track

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    func: Callable[[T], R],
    items: Sequence[T],
    workers: int = 0,
    progress: bool = False,
    description: str = "Working...",
    progress_callback: Optional[Callable[[dict], None]] = None,
) -> List[R]:
    """Applies ``func`` to every item and returns the results in input order.

    :param func: a picklable (module level) function when workers are used
    :param workers: number of worker processes, -1 for one per core, 0 to run in the
        current process, defaults to 0
    :param progress: show a progress bar on stderr
    """
    items = list(items)
    total = len(items)

    if workers > 0 or workers == -1:
        processes = None if workers == -1 else workers
        logger.debug(f"mapping {total} items on a pool of {processes or 'all'} workers")
        with multiprocessing.Pool(processes=processes) as pool:
            results = pool.imap(func, items)
            return list(
                slotlime_track(
                    results,
                    description=description,
                    total=total,
                    disable=not progress,
                    track_callback=progress_callback,
                )
            )

    return [
        func(item)
        for item in slotlime_track(
            items,
            description=description,
            disable=not progress,
            track_callback=progress_callback,
        )
    ]
