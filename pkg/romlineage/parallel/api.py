"""Public API helper for running analysis tasks in parallel."""

import logging
from typing import Any, Callable, List, Optional

from .runner import ParallelRunner

log = logging.getLogger(__name__)

WorkerFunctionType = Callable[[Any], Any]


def run_parallel(
    enabled: bool,
    num_processes: int,
    worker_function: WorkerFunctionType,
    input_data_list: Optional[List[Any]] = None,
) -> List[Any]:
    """
    Applies a worker function to every item, sequentially or in a process pool.

    Args:
        enabled: If True, enables parallel execution. If False, runs sequentially.
        num_processes: Desired number of processes (used if enabled=True).
        worker_function: Module-level function taking one item.
        input_data_list: Work items.

    Returns:
        List[Any]: one result per item, in input order.

    Raises:
        ValueError: num_processes below 1 in parallel mode.
        Exception: Any exception escaping the worker_function.
    """
    items = list(input_data_list or [])
    log.info(f"run_parallel called: enabled={enabled}, num_processes={num_processes}, items={len(items)}")

    # a pool buys nothing for a single item or process
    if not enabled or num_processes == 1 or len(items) <= 1:
        log.info(f"Executing sequentially: worker '{worker_function.__name__}'")
        return [worker_function(item) for item in items]

    runner = ParallelRunner(num_processes=num_processes,
                            worker_function=worker_function,
                            input_data_list=items)
    return runner.run()
