"""Replicated-simulation estimators with deterministic parallel streams.

Every replication owns a private variate stream derived from the plan's
master seed and the replication index, and all aggregation is either a
write to that replication's own slot or an associative integer count.
Results are therefore byte-identical for any thread count or execution
order.  Batches run in fixed chunks through the kernel lanes in
:mod:`polyaurn._kernels`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels
from .embedding import DEFAULT_EVENT_CAP
from .errors import EventCapError, UrnModelError
from .rng import derive_replication_seed
from .stats import wilson_interval
from .urn import DominanceCriterion, ReplacementRule, new_urn

CHUNK = 65536

_CRIT_CODES = {"strict": 0, "majority": 1, "plurality": 2}


@dataclass(frozen=True)
class ExperimentPlan:
    """A replicated experiment: configuration, horizon, and master seed.

    Exactly one of ``n_steps`` (discrete horizon) and ``t_max``
    (continuous horizon) must be set.  ``kind`` is a free-form label
    echoed into reports; the estimators ignore it.
    """

    initial: tuple
    rule: ReplacementRule
    replications: int
    master_seed: int = 0
    n_steps: Optional[int] = None
    t_max: Optional[float] = None
    criterion: Optional[DominanceCriterion] = None
    kind: str = ""

    def __post_init__(self):
        object.__setattr__(self, "initial", tuple(int(c) for c in self.initial))
        new_urn(self.initial, self.rule)
        if self.replications < 1:
            raise UrnModelError("replications must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise UrnModelError("master seed must lie in [0, 2^64)")
        if (self.n_steps is None) == (self.t_max is None):
            raise UrnModelError(
                "exactly one of n_steps and t_max must be given"
            )
        if self.n_steps is not None and self.n_steps < 0:
            raise UrnModelError("n_steps must be non-negative")
        if self.t_max is not None and not self.t_max >= 0.0:
            raise UrnModelError("t_max must be non-negative")
        if self.criterion is not None:
            self.criterion.validate_for(self.rule.q)


class EstimateWithCI(NamedTuple):
    """A probability estimate with its Wilson confidence interval."""

    estimate: float
    lo: float
    hi: float
    confidence: float
    replications: int
    standard_error: float


class RatioStats(NamedTuple):
    """Empirical quantiles of W_N/B_N and the frequency of {ratio < 1}."""

    horizon: int
    quantile_levels: tuple
    quantile_values: tuple
    below_one: EstimateWithCI


class ScaledLimitSample(NamedTuple):
    """Per-colour samples of exp(-m_i t) X_i(t) at a common horizon t."""

    horizon: float
    values: np.ndarray
    white_below_black: EstimateWithCI


def _binomial_estimate(successes, trials, confidence):
    lo, hi = wilson_interval(successes, trials, confidence)
    p = successes / trials
    se = math.sqrt(p * (1.0 - p) / trials)
    return EstimateWithCI(p, lo, hi, confidence, trials, se)


def _run_chunks(n_reps, threads, worker):
    tasks = [(s, min(CHUNK, n_reps - s)) for s in range(0, n_reps, CHUNK)]
    if threads <= 1 or len(tasks) == 1:
        for start, count in tasks:
            worker(start, count)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for _ in pool.map(lambda task: worker(*task), tasks):
                pass


def simulate_replications(plan, *, early_stop=False, want_counts=True, threads=1):
    """Run the discrete urn for every replication of a discrete plan.

    Returns ``(first_failure, final_counts)``.  ``first_failure[i]`` is
    the first step at which the plan's criterion fails (-1 when it holds
    through the horizon, or when the plan has no criterion) and
    ``final_counts`` holds the counts after ``n_steps`` draws, or None
    when ``want_counts`` is false.  ``early_stop`` abandons a replication
    at its first failure; final counts are then meaningful only for
    replications that never fail.
    """
    if plan.n_steps is None:
        raise UrnModelError("simulate_replications needs a discrete horizon")
    crit = plan.criterion
    kind = -1 if crit is None else _CRIT_CODES[crit.kind]
    focus = 0 if crit is None else crit.focus
    q = plan.rule.q
    counts0 = np.asarray(plan.initial, dtype=np.int64)
    m = np.asarray(plan.rule.m, dtype=np.int64)
    n_reps = plan.replications
    out_ff = np.empty(n_reps, dtype=np.int64)
    if want_counts:
        out_counts = np.empty((n_reps, q), dtype=np.int64)
    else:
        out_counts = np.zeros((1, q), dtype=np.int64)

    def worker(start, count):
        _kernels.discrete_batch(
            counts0,
            m,
            plan.n_steps,
            kind,
            focus,
            plan.master_seed,
            start,
            count,
            early_stop,
            want_counts,
            out_ff[start : start + count],
            out_counts[start : start + count] if want_counts else out_counts,
        )

    _run_chunks(n_reps, threads, worker)
    return out_ff, (out_counts if want_counts else None)


def embed_replications(
    plan, *, n_events=None, max_events=DEFAULT_EVENT_CAP, threads=1
):
    """Run the continuous-time embedding for every replication.

    With ``n_events`` set, each replication performs exactly that many
    clock rings (the jump chain) and the plan's horizon is ignored;
    otherwise the run continues until the plan's ``t_max`` and a
    replication exceeding ``max_events`` raises ``EventCapError``.
    Returns ``(final_counts, event_counts)``; the latter is None in
    fixed-event mode.
    """
    q = plan.rule.q
    counts0 = np.asarray(plan.initial, dtype=np.int64)
    m = np.asarray(plan.rule.m, dtype=np.int64)
    n_reps = plan.replications
    out_counts = np.empty((n_reps, q), dtype=np.int64)

    if n_events is not None:
        if n_events < 0:
            raise UrnModelError("n_events must be non-negative")

        def worker(start, count):
            _kernels.embed_events_batch(
                counts0,
                m,
                n_events,
                plan.master_seed,
                start,
                count,
                out_counts[start : start + count],
            )

        _run_chunks(n_reps, threads, worker)
        return out_counts, None

    if plan.t_max is None:
        raise UrnModelError("embed_replications needs a continuous horizon")
    out_events = np.empty(n_reps, dtype=np.int64)

    def worker(start, count):
        _kernels.embed_time_batch(
            counts0,
            m,
            plan.t_max,
            max_events,
            plan.master_seed,
            start,
            count,
            out_counts[start : start + count],
            out_events[start : start + count],
        )

    _run_chunks(n_reps, threads, worker)
    overflowed = np.flatnonzero(out_events < 0)
    if overflowed.size:
        raise EventCapError(
            f"event cap {max_events} exceeded before t={plan.t_max} "
            f"in replication {int(overflowed[0])}"
        )
    return out_counts, out_events


def estimate_dominance(plan, confidence=0.95, threads=1):
    """Estimate the probability the criterion holds through step N.

    Fraction of replications whose dominance check holds at step 0 and
    after every one of the plan's ``n_steps`` draws, with a Wilson
    interval at the given confidence.
    """
    if plan.criterion is None:
        raise UrnModelError("dominance estimation requires a criterion")
    first_failure, _ = simulate_replications(
        plan, early_stop=True, want_counts=False, threads=threads
    )
    successes = int(np.count_nonzero(first_failure == -1))
    return _binomial_estimate(successes, plan.replications, confidence)


def survival_curve_mc(plan, grid=None, confidence=0.95, threads=1):
    """Estimate the survival curve p_N over a grid of horizons.

    One pass per replication records the first failure step; every grid
    point is then an exact count over the same sample, so the estimates
    are non-increasing by construction.  Returns a list of
    ``(N, EstimateWithCI)`` pairs.  ``grid`` defaults to every step from
    0 to the plan horizon and must be increasing within that range.
    """
    if plan.criterion is None:
        raise UrnModelError("survival estimation requires a criterion")
    if plan.n_steps is None:
        raise UrnModelError("survival_curve_mc needs a discrete horizon")
    if grid is None:
        grid = range(plan.n_steps + 1)
    grid = [int(n) for n in grid]
    if not grid:
        raise UrnModelError("grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise UrnModelError("grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > plan.n_steps:
        raise UrnModelError("grid must lie within [0, n_steps]")

    first_failure, _ = simulate_replications(
        plan, early_stop=True, want_counts=False, threads=threads
    )
    failed = first_failure[first_failure >= 0]
    fail_hist = np.bincount(failed, minlength=plan.n_steps + 1)
    failures_by = np.cumsum(fail_hist)
    curve = []
    for n in grid:
        successes = plan.replications - int(failures_by[n])
        curve.append((n, _binomial_estimate(successes, plan.replications, confidence)))
    return curve


def estimate_ratio_stats(
    plan,
    quantile_levels=(0.1, 0.25, 0.5, 0.75, 0.9),
    confidence=0.95,
    threads=1,
):
    """Quantiles of W_N/B_N and the frequency of {W_N/B_N < 1}.

    Colour 0 is the lead colour B, colour 1 is W.  Requires q = 2 and
    b0 >= 1 so the denominator stays positive.
    """
    if plan.rule.q != 2:
        raise UrnModelError("ratio statistics are defined for two colours")
    if plan.n_steps is None:
        raise UrnModelError("estimate_ratio_stats needs a discrete horizon")
    if plan.initial[0] < 1:
        raise UrnModelError("ratio statistics need at least one lead ball")
    levels = tuple(float(v) for v in quantile_levels)
    if any(not 0.0 <= v <= 1.0 for v in levels):
        raise UrnModelError("quantile levels must lie in [0, 1]")

    _, counts = simulate_replications(
        plan, early_stop=False, want_counts=True, threads=threads
    )
    ratios = counts[:, 1] / counts[:, 0]
    values = tuple(float(v) for v in np.quantile(ratios, levels))
    below = int(np.count_nonzero(ratios < 1.0))
    return RatioStats(
        horizon=plan.n_steps,
        quantile_levels=levels,
        quantile_values=values,
        below_one=_binomial_estimate(below, plan.replications, confidence),
    )


def sample_scaled_limits(
    plan, confidence=0.95, max_events=DEFAULT_EVENT_CAP, threads=1
):
    """Sample the scaled counts exp(-m_i t) X_i(t) at t = t_max.

    Returns one sample row per replication plus the frequency of
    {scaled colour 1 < scaled colour 0}, the proxy for P(Z < 1) when
    colours 0 and 1 are B and W.
    """
    if plan.t_max is None:
        raise UrnModelError("sample_scaled_limits needs a continuous horizon")
    counts, _ = embed_replications(plan, max_events=max_events, threads=threads)
    scale = np.exp(-np.asarray(plan.rule.m, dtype=float) * plan.t_max)
    values = counts * scale
    below = int(np.count_nonzero(values[:, 1] < values[:, 0]))
    return ScaledLimitSample(
        horizon=plan.t_max,
        values=values,
        white_below_black=_binomial_estimate(below, plan.replications, confidence),
    )


__all__ = [
    "CHUNK",
    "ExperimentPlan",
    "EstimateWithCI",
    "RatioStats",
    "ScaledLimitSample",
    "derive_replication_seed",
    "simulate_replications",
    "embed_replications",
    "estimate_dominance",
    "survival_curve_mc",
    "estimate_ratio_stats",
    "sample_scaled_limits",
]
