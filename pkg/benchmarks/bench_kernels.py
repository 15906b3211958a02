"""Compare the pure-Python and compiled kernel lanes on fixed workloads.

Run as ``python benchmarks/bench_kernels.py``.  Both lanes produce
bit-identical output (asserted here on a small batch), so the only
difference worth reporting is throughput.
"""

from __future__ import annotations

import time

import numpy as np

from polyaurn._kernels import BACKEND, pure

try:
    from polyaurn._kernels import _fast
except ImportError:
    _fast = None

COUNTS0 = np.array([2, 1], dtype=np.int64)
M = np.array([2, 1], dtype=np.int64)
SEED = 20240915


def _time(fn, *args):
    started = time.perf_counter()
    fn(*args)
    return time.perf_counter() - started


def bench_discrete(impl, n_reps, n_steps):
    out_ff = np.empty(n_reps, dtype=np.int64)
    out_counts = np.empty((n_reps, 2), dtype=np.int64)
    return _time(
        impl.discrete_batch,
        COUNTS0, M, n_steps, 0, 0, SEED, 0, n_reps, False, True,
        out_ff, out_counts,
    )


def bench_embed(impl, n_reps, t_max):
    out_counts = np.empty((n_reps, 2), dtype=np.int64)
    out_events = np.empty(n_reps, dtype=np.int64)
    return _time(
        impl.embed_time_batch,
        COUNTS0, M, t_max, 10**8, SEED, 0, n_reps, out_counts, out_events,
    )


def check_lane_equality():
    n_reps = 256
    ff = [np.empty(n_reps, dtype=np.int64) for _ in range(2)]
    fc = [np.empty((n_reps, 2), dtype=np.int64) for _ in range(2)]
    for out_ff, out_fc, impl in zip(ff, fc, (pure, _fast)):
        impl.discrete_batch(
            COUNTS0, M, 200, 0, 0, SEED, 0, n_reps, False, True, out_ff, out_fc
        )
    assert np.array_equal(ff[0], ff[1]) and np.array_equal(fc[0], fc[1])


def main():
    print(f"active backend: {BACKEND}")
    if _fast is None:
        print("compiled lane unavailable; nothing to compare")
        return
    check_lane_equality()
    print("lane equality on 256 replications: ok")
    print()
    print(f"{'workload':<38}{'pure [s]':>10}{'compiled [s]':>14}{'speedup':>9}")
    workloads = [
        ("discrete  R=2000  N=1000", bench_discrete, 2000, 1000),
        ("discrete  R=200   N=10000", bench_discrete, 200, 10000),
        ("embed     R=2000  t=4.0", bench_embed, 2000, 4.0),
    ]
    for label, fn, n_reps, horizon in workloads:
        t_pure = fn(pure, n_reps, horizon)
        t_fast = fn(_fast, n_reps, horizon)
        print(f"{label:<38}{t_pure:>10.3f}{t_fast:>14.4f}{t_pure / t_fast:>8.0f}x")


if __name__ == "__main__":
    main()
