"""
Independent trials in worker processes.

Each trial is a picklable callable applied to a trial index; results come back
ordered by trial index whatever the worker count, so aggregation is
deterministic. Workers are started with the spawn method.
"""
import multiprocessing as mp
import pickle
from typing import Any, Callable, List, Sequence

from . import rds_logging as logging

logger = logging.getLogger(__name__)


def check_picklable(fn: Callable) -> None:
    """Raise TypeError when fn or its closure cannot be sent to a worker."""
    try:
        pickle.dumps(fn)
        if hasattr(fn, '__closure__') and fn.__closure__:
            for cell in fn.__closure__:
                pickle.dumps(cell.cell_contents)
    except Exception as e:
        logger.error(f"Trial function or its closure variables cannot be pickled: {e}. "
                     "Use workers=1 for unpicklable functions.")
        raise TypeError(f"Trial function must be picklable when workers > 1: {e}") from e


def run_trials(fn: Callable[[int], Any], trial_indices: Sequence[int], workers: int = 1) -> List[Any]:
    """fn(i) for every trial index, in index order."""
    indices = list(trial_indices)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(indices) <= 1:
        logger.debug(f"running {len(indices)} trials inline")
        return [fn(i) for i in indices]
    check_picklable(fn)
    n_workers = min(workers, len(indices))
    logger.info(f"running {len(indices)} trials on {n_workers} worker processes")
    ctx = mp.get_context("spawn")
    with ctx.Pool(processes=n_workers) as pool:
        results = pool.map(fn, indices)
    logger.debug(f"{len(results)} trials finished")
    return results
