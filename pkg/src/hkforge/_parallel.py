import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    """Parallelism cap from HKFORGE_THREADS (default 1, i.e. serial)."""
    raw = os.environ.get("HKFORGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items):
    """Ordered map; runs on a thread pool when HKFORGE_THREADS > 1."""
    items = list(items)
    workers = min(thread_cap(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
