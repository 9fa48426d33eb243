import os
import tqdm
from typing import Callable, Optional, List
from joblib import Parallel, delayed, parallel_backend


class _ProgressParallel(Parallel):
    """
    joblib `Parallel` reporting the number of completed tasks through a tqdm progress bar.
    see: https://stackoverflow.com/a/61900501/16031961
    """

    def __init__(self, use_tqdm=True, total=None, desc=None, *args, **kwargs):
        self._use_tqdm = use_tqdm
        self._total = total
        self._desc = desc
        super().__init__(*args, **kwargs)

    def __call__(self, *args, **kwargs):
        with tqdm.tqdm(disable=not self._use_tqdm, total=self._total, desc=self._desc) as self._pbar:
            return Parallel.__call__(self, *args, **kwargs)

    def print_progress(self):
        if self._total is None:
            self._pbar.total = self.n_dispatched_tasks
        self._pbar.n = self.n_completed_tasks
        self._pbar.refresh()


def num_processes(processes: Optional[int]) -> int:
    """
    Resolves the number of worker processes following joblib's convention.
    :param int processes: `-1` or `0` means all CPUs, `None` means 1, `<-1` means `(n_cpus + 1 + processes)`.
    :rtype: int
    :return: the number of processes, at least 1.
    """
    n_cpus = os.cpu_count() or 1
    if processes is None:
        return 1
    if processes in (-1, 0):
        return n_cpus
    if processes < -1:
        return max(1, n_cpus + 1 + processes)
    return processes


def run_parallel(func: Callable,
                 args: List,
                 processes: Optional[int] = None,
                 use_tqdm: bool = True,
                 desc: Optional[str] = None) -> List:
    """
    Runs the given function for each of the given arguments in parallel and returns a list with the results.
    Log messages of worker processes are not forwarded, so workers should only return results.
    :param func: the function to be executed, has to be picklable (a module-level function).
    :param list args: the list of arguments for the function to be processed in parallel. If the function has multiple
    arguments, this should be a list of tuples, the length of each should match the function's arity.
    :param int processes: the number of parallel processes to use, see `num_processes`. `1` runs sequentially in the
    calling process.
    :param bool use_tqdm: whether to show a progress bar during parallel execution.
    :param str desc: the description shown next to the progress bar.
    :rtype: list
    :return: a list with the results of executing the given function over each of the arguments. Indices will be
    aligned with the input arguments.
    """
    if len(args) == 0:
        return []

    processes = min(num_processes(processes), len(args), os.cpu_count() or 1)
    star = isinstance(args[0], tuple)  # star if function is multi-argument

    if processes == 1:
        it = tqdm.tqdm(args, disable=not use_tqdm, desc=desc)
        return [func(*(arg if star else [arg])) for arg in it]

    n_threads = max(1, (os.cpu_count() or 1) // processes)
    with parallel_backend('loky', inner_max_num_threads=n_threads):  # spread cpus per job
        return _ProgressParallel(n_jobs=processes, use_tqdm=use_tqdm, total=len(args), desc=desc)(
            delayed(func)(*(arg if star else [arg])) for arg in args)
