"""Run deeply recursive tree code on a thread with a large stack.

Generated combinators nest thousands of levels deep, well past CPython's
default recursion limit.  Public entry points that walk terms are wrapped with
:func:`deep`; nested calls run inline once a deep thread is active.
"""

from __future__ import annotations

import functools
import sys
import threading

_STACK_BYTES = 256 * 1024 * 1024
_RECURSION_LIMIT = 250_000
_local = threading.local()
_lock = threading.Lock()


def deep(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        if getattr(_local, "active", False):
            return fn(*args, **kwargs)
        outcome: dict = {}

        def run() -> None:
            _local.active = True
            try:
                outcome["value"] = fn(*args, **kwargs)
            except BaseException as exc:  # re-raised on the calling thread
                outcome["error"] = exc

        with _lock:
            if sys.getrecursionlimit() < _RECURSION_LIMIT:
                sys.setrecursionlimit(_RECURSION_LIMIT)
            old_stack = threading.stack_size()
            threading.stack_size(_STACK_BYTES)
            try:
                worker = threading.Thread(target=run, name=f"mvlam-{fn.__name__}")
                worker.start()
            finally:
                threading.stack_size(old_stack)
        worker.join()
        if "error" in outcome:
            raise outcome["error"]
        return outcome["value"]

    return wrapper
