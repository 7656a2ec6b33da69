"""Timed regions: a monotonic clock with the cyclic garbage collector paused."""
import gc
import time
from contextlib import contextmanager


@contextmanager
def gc_paused():
    """Keep collector pauses out of a timed region, as ``timeit`` does."""
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


clock = time.perf_counter
