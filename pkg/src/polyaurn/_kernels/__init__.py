"""Replication kernels with a compiled fast lane and a pure-Python twin.

The compiled extension is preferred when it imports cleanly; setting the
environment variable ``POLYAURN_PURE=1`` before import forces the pure
lane.  Both lanes implement identical algorithms over identical variate
streams, so swapping them never changes any result, only the speed.
"""

from __future__ import annotations

import os

from . import pure

BACKEND = "pure"
_impl = pure

if os.environ.get("POLYAURN_PURE", "") != "1":
    try:
        from . import _fast

        BACKEND = "compiled"
        _impl = _fast
    except ImportError:
        pass

discrete_batch = _impl.discrete_batch
embed_time_batch = _impl.embed_time_batch
embed_events_batch = _impl.embed_events_batch


def backend() -> str:
    """Name of the active kernel lane, ``"compiled"`` or ``"pure"``."""
    return BACKEND


__all__ = [
    "BACKEND",
    "backend",
    "discrete_batch",
    "embed_time_batch",
    "embed_events_batch",
    "pure",
]
