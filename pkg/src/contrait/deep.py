"""Run deeply recursive evaluation on a worker thread with a large stack."""

from __future__ import annotations

import sys
import threading

STACK_BYTES = 1 << 30
RECURSION_LIMIT = 400_000


def run_deep(fn, *args, **kwargs):
    """Call `fn` on a thread whose stack can hold very deep interpreter
    recursion; exceptions propagate to the caller."""
    outcome = {}

    def target():
        try:
            outcome["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised on the calling thread
            outcome["error"] = exc

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, RECURSION_LIMIT))
    try:
        threading.stack_size(STACK_BYTES)
        worker = threading.Thread(target=target, name="contrait-eval")
        worker.start()
    finally:
        threading.stack_size(old_size)
    worker.join()
    sys.setrecursionlimit(old_limit)
    if "error" in outcome:
        raise outcome["error"]
    return outcome["value"]
