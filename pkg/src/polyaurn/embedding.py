"""Continuous-time view of the urn: every ball carries an Exp(1) clock.

When a clock rings on a ball of colour ``i``, that ball is replaced by
``m[i] + 1`` balls of the same colour, each with a fresh clock.  Observing
the continuous process only at ring times reproduces the discrete urn
chain.  By superposition of the unit-rate clocks, the race is simulated
as a single Exponential(total) waiting time followed by a count-weighted
colour pick, which is O(q) per event instead of O(total balls).

Each event consumes exactly two uniforms, wait first, colour second; the
compiled kernels follow the same order.  State at time ``t`` means the
state after the last event at or before ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, log1p
from typing import NamedTuple, Tuple

from .errors import EventCapError, HorizonError, UrnModelError
from .urn import ReplacementRule, Trajectory, UrnState, pick_colour

DEFAULT_EVENT_CAP = 100_000_000


class ScaledSample(NamedTuple):
    """Per-colour values ``exp(-m[i] * t) * X_i(t)`` at a fixed horizon."""

    horizon: float
    values: Tuple[float, ...]


@dataclass
class ContinuousTrajectory:
    """Events of one continuous-time run up to a fixed horizon.

    ``events`` holds ``(time, colour)`` pairs with strictly increasing
    times; the state after each event follows the same update rule as the
    discrete urn.
    """

    initial: UrnState
    rule: ReplacementRule
    horizon: float
    events: list = field(default_factory=list)

    def states(self) -> list:
        """State after each event, in event order."""
        counts = list(self.initial.counts)
        out = []
        for n, (_, colour) in enumerate(self.events, start=1):
            counts[colour] += self.rule.m[colour]
            out.append(UrnState(tuple(counts), n))
        return out

    def state_at(self, t: float) -> UrnState:
        """State after the last event at or before ``t``."""
        if t < 0 or t > self.horizon:
            raise HorizonError(f"time {t} outside simulated horizon [0, {self.horizon}]")
        counts = list(self.initial.counts)
        n = 0
        for when, colour in self.events:
            if when > t:
                break
            counts[colour] += self.rule.m[colour]
            n += 1
        return UrnState(tuple(counts), n)

    @property
    def final_state(self) -> UrnState:
        sts = self.states()
        return sts[-1] if sts else self.initial


def next_event(state: UrnState, rule: ReplacementRule, stream) -> Tuple[float, int]:
    """Sample the next clock ring: waiting time and ringing colour.

    The wait is Exponential(total count); the colour is picked with
    probability ``counts[i] / total`` independently of the wait.
    """
    total = state.total
    if total < 1:
        raise UrnModelError("empty urn: no clock can ring")
    wait = -log1p(-stream.uniform()) / total
    colour = pick_colour(state.counts, total, stream.uniform())
    return wait, colour


def run_until(
    state: UrnState,
    rule: ReplacementRule,
    t_max: float,
    stream,
    max_events: int = DEFAULT_EVENT_CAP,
) -> ContinuousTrajectory:
    """Simulate all events up to time ``t_max``.

    Memorylessness lets the exponential race be resampled after every
    event.  Raises :class:`EventCapError` if the run would exceed
    ``max_events``; the cap is an explicit error, never silent truncation.
    """
    if t_max < 0:
        raise UrnModelError("t_max must be non-negative")
    counts = list(state.counts)
    total = sum(counts)
    if total < 1:
        raise UrnModelError("empty urn: no clock can ring")
    traj = ContinuousTrajectory(state, rule, t_max)
    tau = 0.0
    while True:
        wait = -log1p(-stream.uniform()) / total
        if tau + wait > t_max:
            return traj
        if len(traj.events) >= max_events:
            raise EventCapError(
                f"event cap {max_events} exceeded before reaching t={t_max}"
            )
        tau += wait
        colour = pick_colour(counts, total, stream.uniform())
        counts[colour] += rule.m[colour]
        total += rule.m[colour]
        traj.events.append((tau, colour))


def jump_chain(ctraj: ContinuousTrajectory) -> Trajectory:
    """Discrete trajectory of the event colours, one draw per clock ring."""
    draws = [colour for _, colour in ctraj.events]
    return Trajectory.from_draws(ctraj.initial, ctraj.rule, draws)


def scaled_sample(
    ctraj: ContinuousTrajectory, rule: ReplacementRule, t: float
) -> ScaledSample:
    """Per-colour ``exp(-m[i] * t) * X_i(t)`` read off one trajectory."""
    state = ctraj.state_at(t)
    values = tuple(
        exp(-rule.m[i] * t) * state.counts[i] for i in range(rule.q)
    )
    return ScaledSample(t, values)
