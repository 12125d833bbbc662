"""Worker pool used by run_parallel to process work items in chunks."""

import logging
import multiprocessing
import time
from typing import Any, Callable, List

log = logging.getLogger(__name__)

WorkerFunctionType = Callable[[Any], Any]


class ParallelRunner:
    """
    Splits a work list into near-equal chunks and maps a worker function over
    them in a process pool. Results come back in input order whatever the schedule.
    """
    def __init__(self,
                 num_processes: int,
                 worker_function: WorkerFunctionType,
                 input_data_list: List[Any]):
        """
        Args:
            num_processes: number of worker processes, at least 1
            worker_function: picklable (module-level) function applied to each item
            input_data_list: work items
        """
        if num_processes <= 0:
            raise ValueError("num_processes must be greater than 0.")
        if input_data_list is None:
            raise ValueError("input_data_list must be provided.")

        self.effective_num_processes = min(num_processes, max(1, len(input_data_list)))
        self.worker_function = worker_function
        self.input_data_list = list(input_data_list)

    def run(self) -> List[Any]:
        """Executes the pool and returns one result per input item, in order."""
        log.info(f"Starting parallel run: {len(self.input_data_list)} item(s), "
                 f"Processes={self.effective_num_processes}")
        start = time.perf_counter()
        chunks = self._split_list(self.input_data_list, self.effective_num_processes)
        tasks = [(self.worker_function, chunk) for chunk in chunks if chunk]
        try:
            with multiprocessing.Pool(processes=self.effective_num_processes) as pool:
                chunk_results = pool.map(self._run_chunk, tasks)
        except Exception as e:
            log.exception(f"An error occurred during the parallel run: {e}")
            raise
        results = [result for chunk in chunk_results for result in chunk]
        log.info(f"Parallel run finished in {time.perf_counter() - start:.2f}s ({len(results)} result(s))")
        return results

    def _split_list(self, lst: List[Any], n: int) -> List[List[Any]]:
        """Splits a list into n roughly equal contiguous chunks."""
        if n <= 0: return []
        if not lst: return [[] for _ in range(n)]
        k, m = divmod(len(lst), n)
        chunks = [lst[i * k + min(i, m):(i + 1) * k + min(i + 1, m)] for i in range(n)]
        log.info(f"Split data into {len(chunks)} chunks. Sizes: {[len(c) for c in chunks]}")
        return chunks

    @staticmethod
    def _run_chunk(task) -> List[Any]:
        """Target executed in each worker process."""
        worker_function, chunk = task
        proc_name = multiprocessing.current_process().name
        log.debug(f"[{proc_name}] Processing {len(chunk)} item(s) with {worker_function.__name__}")
        return [worker_function(item) for item in chunk]
