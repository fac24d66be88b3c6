import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import Any, Callable, Iterable

from pydantic import ValidationError

from unilab.exceptions import UnilabException

logger = logging.getLogger(__name__)


class Workers:
    """Process pool with ordered results.

    A single worker runs every task inline, so results never depend on the
    worker count. Tasks must be picklable module-level callables.
    """

    def __init__(self, max_workers: int = 1):
        if max_workers < 1:
            raise ValueError('max_workers must be at least 1')
        self.max_workers = max_workers
        self.pool: Executor | None = None

    def open(self):
        if self.max_workers > 1 and self.pool is None:
            logger.debug('Opening pool with %d workers', self.max_workers)
            self.pool = ProcessPoolExecutor(max_workers=self.max_workers)

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()
            self.pool = None

    def __enter__(self):
        self.open()
        return self

    def __exit__(self, *exc):
        self.close()

    def map(self, fn: Callable[..., Any], *iterables: Iterable) -> list:
        if self.pool is None:
            return [fn(*args) for args in zip(*iterables)]
        try:
            return list(self.pool.map(fn, *iterables))
        except (UnilabException, ValidationError):
            raise
        except Exception as e:
            raise RuntimeError(f'Error running worker task {fn}: {e}') from e


def split_range(total: int, parts: int) -> list[tuple[int, int]]:
    """Contiguous [start, stop) ranges covering range(total) in order."""
    parts = max(1, min(parts, total)) if total else 1
    bounds = [total * i // parts for i in range(parts + 1)]
    return list(zip(bounds[:-1], bounds[1:]))
