from typing import *

from joblib import Parallel, delayed

__all__ = ['parallel_map']

TItem = TypeVar('TItem')
TResult = TypeVar('TResult')


def parallel_map(func: Callable[[TItem], TResult],
                 items: Iterable[TItem],
                 n_jobs: Optional[int] = None) -> List[TResult]:
    """
    Apply `func` to each of the `items` on a thread pool.

    The results are returned in the order of `items`, regardless of the
    order in which the workers complete, thus the merged output of a
    parallel scan is deterministic.

    >>> parallel_map(lambda x: x * x, [1, 2, 3], n_jobs=2)
    [1, 4, 9]

    Args:
        func: The function to apply.
        items: The items.
        n_jobs: Number of worker threads.  Defaults to
            ``ptstar.settings.num_workers``.

    Returns:
        The list of results.
    """
    if n_jobs is None:
        from ..settings_ import settings
        n_jobs = settings.num_workers
    items = list(items)
    if n_jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    return list(Parallel(n_jobs=n_jobs, prefer='threads')(
        delayed(func)(item) for item in items
    ))
