"""Exact computations: lattice enumeration, chain law, lead survival, birth ODE.

Everything here is simulation-free.  State distributions and survival
curves come from forward dynamic programming over the reachable lattice;
path enumeration provides a brute-force cross-check; the pure-birth
finite-time law is integrated from its Kolmogorov forward equations.

Two arithmetic modes are supported.  ``rational`` keeps every probability
as an exact :class:`fractions.Fraction`; ``float`` uses double precision
for horizons where rationals blow up.  ``auto`` picks rational up to 64
steps and float beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import PathCapError, StateBudgetError, TailMassError, UrnModelError
from .urn import DominanceCriterion, ReplacementRule, UrnState, new_urn

DEFAULT_STATE_BUDGET = 10_000_000
DEFAULT_PATH_CAP = 1_000_000
DEFAULT_TAIL_TOL = 1e-9


def _initial_counts(initial, rule: ReplacementRule) -> Tuple[int, ...]:
    """Accept an UrnState or a raw counts sequence; validate against rule."""
    counts = initial.counts if isinstance(initial, UrnState) else initial
    return new_urn(counts, rule).counts


@dataclass
class StateDistribution:
    """Exact probability map over reachable count vectors at a fixed step.

    Only states with positive probability are stored; in rational mode the
    entries sum to exactly 1.
    """

    step: int
    mode: str
    entries: Dict[Tuple[int, ...], object]

    def total_probability(self):
        return sum(self.entries.values())

    def probability(self, counts: Sequence[int]):
        return self.entries.get(tuple(counts), 0)


@dataclass
class SurvivalCurve:
    """Probabilities ``values[n]`` that a criterion held at every step 0..n."""

    mode: str
    values: List[object]

    def as_floats(self) -> List[float]:
        return [float(v) for v in self.values]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int):
        return self.values[n]


class BirthProcessDistribution(NamedTuple):
    """Truncated finite-time law of a pure-birth process on a lattice."""

    counts: np.ndarray
    probabilities: np.ndarray
    tail_mass: float

    def mean(self) -> float:
        return float(np.dot(self.counts, self.probabilities))

    def cdf(self, x: float) -> float:
        """P(X <= x) under the truncated law."""
        idx = np.searchsorted(self.counts, x, side="right")
        return float(np.sum(self.probabilities[:idx]))


def _resolve_mode(mode: str, n: int) -> str:
    if mode == "auto":
        return "rational" if n <= 64 else "float"
    if mode not in ("rational", "float"):
        raise UrnModelError(f"unknown arithmetic mode {mode!r}")
    return mode


def reachable_states(
    initial, rule: ReplacementRule, n: int
) -> set:
    """All count vectors attainable in exactly ``n`` draws.

    These are ``initial + sum_i k_i * m_i * e_i`` over non-negative ``k``
    with ``sum k_i = n``, regardless of whether the path has positive
    probability.
    """
    if n < 0:
        raise UrnModelError("n must be non-negative")
    counts0 = _initial_counts(initial, rule)
    q = rule.q
    out = set()

    def rec(i: int, remaining: int, acc: list) -> None:
        if i == q - 1:
            acc.append(remaining)
            out.add(
                tuple(counts0[j] + acc[j] * rule.m[j] for j in range(q))
            )
            acc.pop()
            return
        for k in range(remaining + 1):
            acc.append(k)
            rec(i + 1, remaining - k, acc)
            acc.pop()

    rec(0, n, [])
    return out


def _dist_two_colour_float(
    counts0: Tuple[int, ...], rule: ReplacementRule, n: int, budget: int
) -> np.ndarray:
    """Vectorized two-colour forward recursion; index k = colour-0 draws."""
    if n + 1 > budget:
        raise StateBudgetError(f"{n + 1} lattice states exceed budget {budget}")
    b0, w0 = counts0
    mb, mw = rule.m
    p = np.array([1.0])
    for s in range(n):
        k = np.arange(s + 1, dtype=np.float64)
        b = b0 + k * mb
        w = w0 + (s - k) * mw
        tot = b + w
        nxt = np.zeros(s + 2)
        nxt[: s + 1] += p * (w / tot)
        nxt[1:] += p * (b / tot)
        p = nxt
    return p


def state_distribution(
    initial,
    rule: ReplacementRule,
    n: int,
    mode: str = "auto",
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> StateDistribution:
    """Exact push-forward of the chain law to step ``n``.

    ``P(s') = sum_s P(s) * counts_i(s) / total(s)`` over the predecessors
    of ``s'``.  Zero-probability lattice points are omitted.
    """
    if n < 0:
        raise UrnModelError("n must be non-negative")
    counts0 = _initial_counts(initial, rule)
    mode = _resolve_mode(mode, n)
    q = rule.q
    m = rule.m

    if q == 2 and mode == "float":
        p = _dist_two_colour_float(counts0, rule, n, state_budget)
        b0, w0 = counts0
        entries = {
            (b0 + k * m[0], w0 + (n - k) * m[1]): float(p[k])
            for k in range(n + 1)
            if p[k] > 0.0
        }
        return StateDistribution(n, mode, entries)

    one = Fraction(1) if mode == "rational" else 1.0
    cur: Dict[Tuple[int, ...], object] = {counts0: one}
    visited = len(cur)
    for _ in range(n):
        nxt: Dict[Tuple[int, ...], object] = {}
        for counts, prob in cur.items():
            total = sum(counts)
            for i in range(q):
                c = counts[i]
                if c == 0:
                    continue
                pi = Fraction(c, total) if mode == "rational" else c / total
                nc = counts[:i] + (c + m[i],) + counts[i + 1 :]
                if nc in nxt:
                    nxt[nc] += prob * pi
                else:
                    nxt[nc] = prob * pi
        visited += len(nxt)
        if visited > state_budget:
            raise StateBudgetError(
                f"state budget {state_budget} exceeded at step with {len(nxt)} states"
            )
        cur = nxt
    return StateDistribution(n, mode, cur)


def survival_probability(
    initial,
    rule: ReplacementRule,
    n_max: int,
    crit: DominanceCriterion,
    mode: str = "auto",
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> SurvivalCurve:
    """Exact curve ``p_n = P(criterion holds at every step 0..n)``.

    The DP keeps only states that never violated the criterion; all
    violating mass is lumped into one absorbing failure class, so the
    live state set stays minimal.  ``p_0`` is 0 or 1.
    """
    if n_max < 0:
        raise UrnModelError("n_max must be non-negative")
    counts0 = _initial_counts(initial, rule)
    crit.validate_for(rule.q)
    mode = _resolve_mode(mode, n_max)
    q = rule.q
    m = rule.m

    if q == 2 and mode == "float" and crit.kind == "strict":
        return _survival_two_colour_float(counts0, rule, n_max, crit, state_budget)

    one = Fraction(1) if mode == "rational" else 1.0
    zero = Fraction(0) if mode == "rational" else 0.0
    alive: Dict[Tuple[int, ...], object] = {}
    if crit.satisfied(counts0):
        alive[counts0] = one
    values = [sum(alive.values(), zero)]
    visited = len(alive)
    for _ in range(n_max):
        nxt: Dict[Tuple[int, ...], object] = {}
        for counts, prob in alive.items():
            total = sum(counts)
            for i in range(q):
                c = counts[i]
                if c == 0:
                    continue
                nc = counts[:i] + (c + m[i],) + counts[i + 1 :]
                if not crit.satisfied(nc):
                    continue
                pi = Fraction(c, total) if mode == "rational" else c / total
                if nc in nxt:
                    nxt[nc] += prob * pi
                else:
                    nxt[nc] = prob * pi
        visited += len(nxt)
        if visited > state_budget:
            raise StateBudgetError(
                f"state budget {state_budget} exceeded at step with {len(nxt)} states"
            )
        alive = nxt
        values.append(sum(alive.values(), zero))
    return SurvivalCurve(mode, values)


def _survival_two_colour_float(
    counts0: Tuple[int, ...],
    rule: ReplacementRule,
    n_max: int,
    crit: DominanceCriterion,
    budget: int,
) -> SurvivalCurve:
    if n_max + 1 > budget:
        raise StateBudgetError(f"{n_max + 1} lattice states exceed budget {budget}")
    b0, w0 = counts0
    mb, mw = rule.m
    f = crit.focus

    def lead(b: np.ndarray, w: np.ndarray) -> np.ndarray:
        return b > w if f == 0 else w > b

    p = np.array([1.0 if crit.satisfied(counts0) else 0.0])
    values = [float(p.sum())]
    for s in range(n_max):
        k = np.arange(s + 1, dtype=np.float64)
        b = b0 + k * mb
        w = w0 + (s - k) * mw
        tot = b + w
        nxt = np.zeros(s + 2)
        nxt[: s + 1] += p * (w / tot)
        nxt[1:] += p * (b / tot)
        kn = np.arange(s + 2, dtype=np.float64)
        bn = b0 + kn * mb
        wn = w0 + (s + 1 - kn) * mw
        nxt[~lead(bn, wn)] = 0.0
        p = nxt
        values.append(float(p.sum()))
    return SurvivalCurve("float", values)


def enumerate_paths(
    initial,
    rule: ReplacementRule,
    n: int,
    cap: int = DEFAULT_PATH_CAP,
) -> List[Tuple[Tuple[int, ...], Fraction]]:
    """All ``q^n`` draw sequences of length ``n`` with exact probabilities.

    Probabilities are exact rationals and sum to 1; sequences that draw
    from an empty colour carry probability 0.  Raises
    :class:`PathCapError` when ``q^n`` exceeds ``cap``.
    """
    if n < 0:
        raise UrnModelError("n must be non-negative")
    counts0 = _initial_counts(initial, rule)
    q = rule.q
    if q**n > cap:
        raise PathCapError(f"{q}^{n} paths exceed cap {cap}")
    m = rule.m
    paths: List[Tuple[Tuple[int, ...], Fraction]] = []
    counts = list(counts0)
    prefix: List[int] = []

    def rec(depth: int, prob: Fraction) -> None:
        if depth == n:
            paths.append((tuple(prefix), prob))
            return
        total = sum(counts)
        for i in range(q):
            pi = Fraction(counts[i], total)
            prefix.append(i)
            counts[i] += m[i]
            rec(depth + 1, prob * pi)
            counts[i] -= m[i]
            prefix.pop()

    rec(0, Fraction(1))
    return paths


def aggregate_paths(
    initial,
    rule: ReplacementRule,
    paths: Sequence[Tuple[Tuple[int, ...], Fraction]],
) -> Dict[Tuple[int, ...], Fraction]:
    """Group path probabilities by endpoint state, dropping zero mass."""
    counts0 = _initial_counts(initial, rule)
    out: Dict[Tuple[int, ...], Fraction] = {}
    for draws, prob in paths:
        if prob == 0:
            continue
        counts = list(counts0)
        for colour in draws:
            counts[colour] += rule.m[colour]
        key = tuple(counts)
        out[key] = out.get(key, Fraction(0)) + prob
    return out


def birth_process_distribution(
    b0: int,
    m: int,
    t: float,
    truncation: int,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> BirthProcessDistribution:
    """Finite-time law of the pure-birth process with jump size ``m``.

    Each of ``k`` living balls rings at unit rate and adds ``m`` balls, so
    the forward equations on the lattice ``b0, b0 + m, ...`` read
    ``p_k' = (k - m) p_{k-m} - k p_k``.  They are integrated with a
    fixed-step classical 4th-order Runge-Kutta scheme with step
    ``min(1e-3, 1 / (10 * truncation))``, adjusted to land exactly on
    ``t``.  Probability that escapes past the truncation bound is reported
    as ``tail_mass``; if it exceeds ``tail_tol`` the computation fails and
    a larger truncation is required.
    """
    if b0 < 1:
        raise UrnModelError("b0 must be at least 1")
    if m < 1:
        raise UrnModelError("jump size m must be at least 1")
    if t <= 0:
        raise UrnModelError("t must be positive")
    if truncation <= b0:
        raise UrnModelError("truncation must exceed b0")

    counts = np.arange(b0, truncation + 1, m, dtype=np.int64)
    rates = counts.astype(np.float64)
    p = np.zeros(len(counts))
    p[0] = 1.0

    def rhs(state: np.ndarray) -> np.ndarray:
        d = -rates * state
        d[1:] += rates[:-1] * state[:-1]
        return d

    h = min(1e-3, 1.0 / (10.0 * truncation))
    n_steps = max(1, math.ceil(t / h))
    h = t / n_steps
    for _ in range(n_steps):
        k1 = rhs(p)
        k2 = rhs(p + 0.5 * h * k1)
        k3 = rhs(p + 0.5 * h * k2)
        k4 = rhs(p + h * k3)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    tail = float(1.0 - p.sum())
    if tail > tail_tol:
        raise TailMassError(
            f"tail mass {tail:.3e} above tolerance {tail_tol:.3e}; "
            f"increase truncation (currently {truncation})"
        )
    p = np.maximum(p, 0.0)
    return BirthProcessDistribution(counts, p, tail)
