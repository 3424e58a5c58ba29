"""Order-preserving parallel map capped by ``RRLAB_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

from .errors import ValidationError

T = TypeVar("T")
R = TypeVar("R")


def worker_count(n_items: int | None = None) -> int:
    raw = os.environ.get("RRLAB_THREADS", "")
    cap = os.cpu_count() or 1
    if raw.strip():
        try:
            cap = int(raw)
        except ValueError:
            raise ValidationError(f"RRLAB_THREADS must be an integer, got {raw!r}") from None
        if cap < 1:
            raise ValidationError("RRLAB_THREADS must be >= 1")
    if n_items is not None:
        cap = min(cap, max(n_items, 1))
    return cap


def ordered_map(fn: Callable[[T], R], items: Sequence[T], min_items: int = 4) -> list[R]:
    """``[fn(x) for x in items]``, spread over worker processes.

    Results come back in input order, so outputs do not depend on the
    worker count.  ``fn`` must be a picklable top-level function.
    """
    items = list(items)
    workers = worker_count(len(items))
    if workers <= 1 or len(items) < min_items:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
