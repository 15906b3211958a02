"""Pure-Python replication kernels: the reference lane.

Each batch function simulates a contiguous block of replications and
writes per-replication results into caller-provided arrays.  Replication
``rep_start + i`` derives its own splitmix64 stream from the master seed,
so output depends only on the replication index, never on chunking or
thread count.  The compiled lane in ``_fast.pyx`` implements exactly the
same loops over exactly the same variate sequences; the two lanes must
stay bit-identical.

Uniform consumption contract (per replication):
  * discrete draw: 1 uniform;
  * continuous event within horizon: 2 uniforms (wait, then colour), plus
    1 final wait uniform that overshoots the horizon;
  * fixed-event-count run: 2 uniforms per event (the wait is discarded).
"""

from __future__ import annotations

from math import log1p

from ..rng import GOLDEN_GAMMA, MASK64, derive_replication_seed

_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0

CRIT_NONE = -1
CRIT_STRICT = 0
CRIT_MAJORITY = 1
CRIT_PLURALITY = 2


def _ok(counts, total, kind, focus):
    if kind == CRIT_STRICT:
        return counts[focus] > counts[1 - focus]
    if kind == CRIT_MAJORITY:
        return 2 * counts[focus] > total
    if kind == CRIT_PLURALITY:
        cf = counts[focus]
        for j, c in enumerate(counts):
            if j != focus and c >= cf:
                return False
        return True
    return True


def discrete_batch(
    counts0,
    m,
    n_steps,
    crit_kind,
    focus,
    master_seed,
    rep_start,
    n_reps,
    early_stop,
    want_counts,
    out_ff,
    out_counts,
):
    """Simulate ``n_reps`` discrete runs of ``n_steps`` draws each.

    Writes the first step at which the criterion fails (0 for an initial
    violation, -1 if it holds throughout) into ``out_ff`` and, when
    ``want_counts``, the final counts into ``out_counts``.  With
    ``early_stop`` the run stops at the first failure, which leaves the
    recorded failure step unchanged but the final counts undefined.
    """
    base = [int(c) for c in counts0]
    mm = [int(v) for v in m]
    q = len(base)
    for i in range(n_reps):
        state = derive_replication_seed(master_seed, rep_start + i)
        counts = base.copy()
        total = sum(counts)
        ff = -1
        if crit_kind != CRIT_NONE and not _ok(counts, total, crit_kind, focus):
            ff = 0
        if not (early_stop and ff == 0):
            for n in range(1, n_steps + 1):
                state = (state + GOLDEN_GAMMA) & MASK64
                z = ((state ^ (state >> 30)) * _M1) & MASK64
                z = ((z ^ (z >> 27)) * _M2) & MASK64
                z ^= z >> 31
                r = (((z >> 11) + 0.5) * _INV_2_53) * total
                acc = 0
                last_pos = 0
                for j in range(q):
                    cj = counts[j]
                    if cj > 0:
                        last_pos = j
                    acc += cj
                    if r < acc:
                        c = j
                        break
                else:
                    c = last_pos
                counts[c] += mm[c]
                total += mm[c]
                if ff == -1 and crit_kind != CRIT_NONE and not _ok(
                    counts, total, crit_kind, focus
                ):
                    ff = n
                    if early_stop:
                        break
        out_ff[i] = ff
        if want_counts:
            for j in range(q):
                out_counts[i, j] = counts[j]


def embed_time_batch(
    counts0,
    m,
    t_max,
    max_events,
    master_seed,
    rep_start,
    n_reps,
    out_counts,
    out_events,
):
    """Simulate ``n_reps`` continuous-time runs up to time ``t_max``.

    Writes final counts and the number of events; an event count of -1
    marks a replication that hit ``max_events`` before its horizon.
    """
    base = [int(c) for c in counts0]
    mm = [int(v) for v in m]
    q = len(base)
    for i in range(n_reps):
        state = derive_replication_seed(master_seed, rep_start + i)
        counts = base.copy()
        total = sum(counts)
        tau = 0.0
        events = 0
        overflow = False
        while True:
            state = (state + GOLDEN_GAMMA) & MASK64
            z = ((state ^ (state >> 30)) * _M1) & MASK64
            z = ((z ^ (z >> 27)) * _M2) & MASK64
            z ^= z >> 31
            u1 = ((z >> 11) + 0.5) * _INV_2_53
            wait = -log1p(-u1) / total
            if tau + wait > t_max:
                break
            if events >= max_events:
                overflow = True
                break
            tau += wait
            state = (state + GOLDEN_GAMMA) & MASK64
            z = ((state ^ (state >> 30)) * _M1) & MASK64
            z = ((z ^ (z >> 27)) * _M2) & MASK64
            z ^= z >> 31
            r = (((z >> 11) + 0.5) * _INV_2_53) * total
            acc = 0
            last_pos = 0
            for j in range(q):
                cj = counts[j]
                if cj > 0:
                    last_pos = j
                acc += cj
                if r < acc:
                    c = j
                    break
            else:
                c = last_pos
            counts[c] += mm[c]
            total += mm[c]
            events += 1
        out_events[i] = -1 if overflow else events
        for j in range(q):
            out_counts[i, j] = counts[j]


def embed_events_batch(
    counts0,
    m,
    n_events,
    master_seed,
    rep_start,
    n_reps,
    out_counts,
):
    """Simulate continuous-time runs for exactly ``n_events`` clock rings.

    The jump chain ignores waiting times, but each event still consumes
    its wait uniform so the colour stream matches ``embed_time_batch``.
    """
    base = [int(c) for c in counts0]
    mm = [int(v) for v in m]
    q = len(base)
    for i in range(n_reps):
        state = derive_replication_seed(master_seed, rep_start + i)
        counts = base.copy()
        total = sum(counts)
        for _ in range(n_events):
            state = (state + GOLDEN_GAMMA) & MASK64  # wait variate, discarded
            state = (state + GOLDEN_GAMMA) & MASK64
            z = ((state ^ (state >> 30)) * _M1) & MASK64
            z = ((z ^ (z >> 27)) * _M2) & MASK64
            z ^= z >> 31
            r = (((z >> 11) + 0.5) * _INV_2_53) * total
            acc = 0
            last_pos = 0
            for j in range(q):
                cj = counts[j]
                if cj > 0:
                    last_pos = j
                acc += cj
                if r < acc:
                    c = j
                    break
            else:
                c = last_pos
            counts[c] += mm[c]
            total += mm[c]
        for j in range(q):
            out_counts[i, j] = counts[j]
