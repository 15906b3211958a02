# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False
"""Compiled replication kernels: the fast lane.

Line-for-line mirror of ``pure.py``; both lanes draw the same splitmix64
variates in the same order and must produce bit-identical output.  Colour
counts live in a fixed 64-slot buffer, so dispatch rejects more colours
than that before calling in.
"""

from libc.math cimport log1p

ctypedef unsigned long long u64
ctypedef long long i64

cdef enum:
    MAX_COLOURS = 64

cdef double INV_2_53 = 1.0 / 9007199254740992.0

cdef inline u64 _mix64(u64 z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)

cdef inline double _uniform(u64 *state) noexcept nogil:
    state[0] += 0x9E3779B97F4A7C15ULL
    return (<double>(_mix64(state[0]) >> 11) + 0.5) * INV_2_53

cdef inline u64 _rep_seed(u64 master, u64 index) noexcept nogil:
    return _mix64(_mix64(master) ^ index)

cdef inline bint _ok(i64 *counts, int q, i64 total, int kind, int focus) noexcept nogil:
    cdef int j
    cdef i64 cf
    if kind == 0:
        return counts[focus] > counts[1 - focus]
    if kind == 1:
        return 2 * counts[focus] > total
    if kind == 2:
        cf = counts[focus]
        for j in range(q):
            if j != focus and counts[j] >= cf:
                return False
        return True
    return True

cdef inline int _pick(i64 *counts, int q, i64 total, double u) noexcept nogil:
    cdef double r = u * <double>total
    cdef i64 acc = 0
    cdef int j
    cdef int last_pos = 0
    for j in range(q):
        if counts[j] > 0:
            last_pos = j
        acc += counts[j]
        if r < <double>acc:
            return j
    return last_pos


def discrete_batch(counts0, m, i64 n_steps, int crit_kind, int focus,
                   u64 master_seed, i64 rep_start, i64 n_reps,
                   bint early_stop, bint want_counts,
                   i64[::1] out_ff, i64[:, ::1] out_counts):
    cdef int q = len(counts0)
    cdef i64[MAX_COLOURS] base
    cdef i64[MAX_COLOURS] mm
    cdef i64[MAX_COLOURS] counts
    cdef int j, c
    if q > MAX_COLOURS:
        raise ValueError("compiled kernel supports at most 64 colours")
    for j in range(q):
        base[j] = counts0[j]
        mm[j] = m[j]
    cdef i64 i, n, total, ff
    cdef u64 state
    cdef double u
    cdef bint stopped
    with nogil:
        for i in range(n_reps):
            state = _rep_seed(master_seed, <u64>(rep_start + i))
            total = 0
            for j in range(q):
                counts[j] = base[j]
                total += base[j]
            ff = -1
            if crit_kind != -1 and not _ok(counts, q, total, crit_kind, focus):
                ff = 0
            if not (early_stop and ff == 0):
                for n in range(1, n_steps + 1):
                    u = _uniform(&state)
                    c = _pick(counts, q, total, u)
                    counts[c] += mm[c]
                    total += mm[c]
                    if ff == -1 and crit_kind != -1 and not _ok(
                            counts, q, total, crit_kind, focus):
                        ff = n
                        if early_stop:
                            break
            out_ff[i] = ff
            if want_counts:
                for j in range(q):
                    out_counts[i, j] = counts[j]


def embed_time_batch(counts0, m, double t_max, i64 max_events,
                     u64 master_seed, i64 rep_start, i64 n_reps,
                     i64[:, ::1] out_counts, i64[::1] out_events):
    cdef int q = len(counts0)
    cdef i64[MAX_COLOURS] base
    cdef i64[MAX_COLOURS] mm
    cdef i64[MAX_COLOURS] counts
    cdef int j, c
    if q > MAX_COLOURS:
        raise ValueError("compiled kernel supports at most 64 colours")
    for j in range(q):
        base[j] = counts0[j]
        mm[j] = m[j]
    cdef i64 i, total, events
    cdef u64 state
    cdef double tau, wait, u
    cdef bint overflow
    with nogil:
        for i in range(n_reps):
            state = _rep_seed(master_seed, <u64>(rep_start + i))
            total = 0
            for j in range(q):
                counts[j] = base[j]
                total += base[j]
            tau = 0.0
            events = 0
            overflow = False
            while True:
                u = _uniform(&state)
                wait = -log1p(-u) / <double>total
                if tau + wait > t_max:
                    break
                if events >= max_events:
                    overflow = True
                    break
                tau += wait
                u = _uniform(&state)
                c = _pick(counts, q, total, u)
                counts[c] += mm[c]
                total += mm[c]
                events += 1
            out_events[i] = -1 if overflow else events
            for j in range(q):
                out_counts[i, j] = counts[j]


def embed_events_batch(counts0, m, i64 n_events,
                       u64 master_seed, i64 rep_start, i64 n_reps,
                       i64[:, ::1] out_counts):
    cdef int q = len(counts0)
    cdef i64[MAX_COLOURS] base
    cdef i64[MAX_COLOURS] mm
    cdef i64[MAX_COLOURS] counts
    cdef int j, c
    if q > MAX_COLOURS:
        raise ValueError("compiled kernel supports at most 64 colours")
    for j in range(q):
        base[j] = counts0[j]
        mm[j] = m[j]
    cdef i64 i, e, total
    cdef u64 state
    cdef double u
    with nogil:
        for i in range(n_reps):
            state = _rep_seed(master_seed, <u64>(rep_start + i))
            total = 0
            for j in range(q):
                counts[j] = base[j]
                total += base[j]
            for e in range(n_events):
                state += 0x9E3779B97F4A7C15ULL  # wait variate, discarded
                u = _uniform(&state)
                c = _pick(counts, q, total, u)
                counts[c] += mm[c]
                total += mm[c]
            for j in range(q):
                out_counts[i, j] = counts[j]
