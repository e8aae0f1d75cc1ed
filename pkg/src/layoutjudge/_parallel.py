"""Worker-pool plumbing shared by corpus building and evaluation.

The LAYOUTJUDGE_THREADS environment variable caps parallelism; the default
is the number of logical cores. Work is always dispatched in input order so
results are deterministic regardless of worker count.
"""

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import UsageError

THREADS_ENV = "LAYOUTJUDGE_THREADS"


def worker_count():
    """Effective parallelism: the env cap when set, else logical cores."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer") from None
    if value < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer")
    return value


def parallel_map(fn, items, workers=None):
    """Ordered map over items, using worker processes when allowed.

    fn must be picklable (a module-level callable). Falls back to an
    in-process loop for a single worker or a single item.
    """
    items = list(items)
    if workers is None:
        workers = worker_count()
    workers = max(1, min(int(workers), len(items)))
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
