from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def run_in_pool(function: Callable[[T], R], items: Sequence[T], num_workers: int = 1) -> List[R]:
    """Apply ``function`` to every item, results in input order.

    Args:
        function (Callable): work for one item
        items (Sequence): inputs
        num_workers (int, optional): thread count; 1 runs inline. Defaults to 1.

    Example
        >>> run_in_pool(abs, [-1, 2, -3], 2)
        [1, 2, 3]
    """
    if num_workers <= 1 or len(items) <= 1:
        return [function(item) for item in items]

    with ThreadPoolExecutor(num_workers) as executor:
        return list(executor.map(function, items))
