"""Discrete-time urn dynamics with colour-dependent reinforcement.

A draw removes one ball uniformly at random and returns it together with
``m[i]`` extra balls of the drawn colour ``i``.  The reinforcement counts
may differ between colours, so one colour can be systematically favoured.
This module owns the value types, the single-draw and trajectory samplers,
the lead criteria (strict pairwise lead, majority, plurality) and the
deterministic two-block path used to certify that perpetual leads are
reachable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

from .errors import UrnModelError

CRITERION_KINDS = ("strict", "majority", "plurality")


@dataclass(frozen=True)
class ReplacementRule:
    """Per-colour reinforcement counts ``m``; drawn colour i gains m[i] balls."""

    m: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))
        if len(self.m) < 2:
            raise UrnModelError("replacement rule needs at least two colours")
        if any(v < 1 for v in self.m):
            raise UrnModelError(f"reinforcement counts must be >= 1, got {self.m}")

    @property
    def q(self) -> int:
        return len(self.m)


class UrnState(NamedTuple):
    """Ball counts per colour after ``step`` draws."""

    counts: Tuple[int, ...]
    step: int

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class DominanceCriterion:
    """A lead condition on the focus colour, checked state by state.

    kind:
        ``strict``    focus colour strictly outnumbers the single other
                      colour (two-colour urns only);
        ``majority``  focus colour strictly outnumbers all others combined;
        ``plurality`` focus colour strictly outnumbers every other single
                      colour.
    Equality never satisfies a criterion.
    """

    kind: str = "strict"
    focus: int = 0

    def __post_init__(self) -> None:
        if self.kind not in CRITERION_KINDS:
            raise UrnModelError(
                f"unknown criterion kind {self.kind!r}; expected one of {CRITERION_KINDS}"
            )
        if self.focus < 0:
            raise UrnModelError("focus colour index must be non-negative")

    def validate_for(self, q: int) -> None:
        if self.kind == "strict" and q != 2:
            raise UrnModelError("strict pairwise criterion requires exactly two colours")
        if q < 2:
            raise UrnModelError("criteria require at least two colours")
        if self.focus >= q:
            raise UrnModelError(f"focus colour {self.focus} out of range for q={q}")

    def satisfied(self, counts: Sequence[int]) -> bool:
        f = self.focus
        if self.kind == "strict":
            return counts[f] > counts[1 - f]
        if self.kind == "majority":
            return 2 * counts[f] > sum(counts)
        return counts[f] > max(c for j, c in enumerate(counts) if j != f)


@dataclass
class Trajectory:
    """A realized draw sequence and the states it induces.

    ``states[n]`` is the urn after draw ``draws[n]``; the initial state is
    kept separately so ``len(states) == len(draws)`` always holds.
    """

    initial: UrnState
    draws: list
    states: list

    @classmethod
    def from_draws(
        cls, initial: UrnState, rule: ReplacementRule, draws: Sequence[int]
    ) -> "Trajectory":
        counts = list(initial.counts)
        states = []
        for n, colour in enumerate(draws, start=initial.step + 1):
            counts[colour] += rule.m[colour]
            states.append(UrnState(tuple(counts), n))
        return cls(initial, list(draws), states)

    @property
    def final_state(self) -> UrnState:
        return self.states[-1] if self.states else self.initial

    def all_states(self) -> list:
        """Initial state followed by the state after each draw."""
        return [self.initial, *self.states]


def new_urn(initial_counts: Sequence[int], rule: ReplacementRule) -> UrnState:
    """Validate initial counts against a rule and return the step-0 state.

    Two-colour urns may start with one empty colour; with three or more
    colours every colour must start with at least one ball.
    """
    counts = tuple(int(c) for c in initial_counts)
    if len(counts) != rule.q:
        raise UrnModelError(
            f"dimension mismatch: {len(counts)} initial counts for {rule.q} colours"
        )
    if any(c < 0 for c in counts):
        raise UrnModelError(f"initial counts must be non-negative, got {counts}")
    if sum(counts) < 1:
        raise UrnModelError("empty urn: no ball to draw")
    if rule.q >= 3 and any(c < 1 for c in counts):
        raise UrnModelError("urns with three or more colours need every colour present")
    return UrnState(counts, 0)


def pick_colour(counts: Sequence[int], total: int, u: float) -> int:
    """Map one uniform variate to a colour index, proportionally to counts.

    Walks the cumulative counts and returns the first colour whose
    cumulative share exceeds ``u * total``.  The compiled kernels replicate
    this walk exactly, so both lanes resolve edge roundings identically.
    """
    r = u * total
    acc = 0
    last_pos = 0
    for i, c in enumerate(counts):
        if c > 0:
            last_pos = i
        acc += c
        if r < acc:
            return i
    return last_pos  # u*total rounded up to total; measure ~2^-54


def draw_step(state: UrnState, rule: ReplacementRule, stream) -> Tuple[int, UrnState]:
    """Perform one uniform draw and reinforce the drawn colour.

    Consumes exactly one uniform from ``stream``.  Colour ``i`` is selected
    with probability ``counts[i] / total``.
    """
    total = state.total
    if total < 1:
        raise UrnModelError("empty urn: no ball to draw")
    colour = pick_colour(state.counts, total, stream.uniform())
    counts = list(state.counts)
    counts[colour] += rule.m[colour]
    return colour, UrnState(tuple(counts), state.step + 1)


def run_trajectory(
    state: UrnState, rule: ReplacementRule, n_steps: int, stream
) -> Trajectory:
    """Run ``n_steps`` draws; deterministic given the variate stream."""
    if n_steps < 0:
        raise UrnModelError("n_steps must be non-negative")
    draws = []
    states = []
    counts = list(state.counts)
    total = sum(counts)
    if total < 1:
        raise UrnModelError("empty urn: no ball to draw")
    for n in range(1, n_steps + 1):
        colour = pick_colour(counts, total, stream.uniform())
        counts[colour] += rule.m[colour]
        total += rule.m[colour]
        draws.append(colour)
        states.append(UrnState(tuple(counts), state.step + n))
    return Trajectory(state, draws, states)


def check_dominance_prefix(
    traj: Trajectory, crit: DominanceCriterion
) -> Tuple[bool, Optional[int]]:
    """Check the criterion at step 0 and after every draw of a trajectory.

    Returns ``(holds, first_failure)`` where ``first_failure`` is the
    smallest violating step index, or None when the criterion holds
    throughout.  An initial tie or deficit fails at step 0.
    """
    crit.validate_for(len(traj.initial.counts))
    if not crit.satisfied(traj.initial.counts):
        return False, traj.initial.step
    for st in traj.states:
        if not crit.satisfied(st.counts):
            return False, st.step
    return True, None


def two_block_path(
    b0: int, w0: int, rule: ReplacementRule, k_lead: int, k_trail: int
) -> Tuple[Trajectory, bool]:
    """Deterministic path: ``k_lead`` colour-0 draws then ``k_trail`` colour-1 draws.

    Along this path the lead ``B_n - W_n`` first rises by ``m[0]`` per draw
    and then falls by ``m[1]`` per draw, so it stays positive at every step
    exactly when it is positive at both endpoints.  The returned flag is
    that endpoint check; the test suite verifies the equivalence against a
    step-by-step scan.
    """
    if rule.q != 2:
        raise UrnModelError("two-block paths are defined for two-colour urns")
    if not b0 > w0 >= 0:
        raise UrnModelError(f"need b0 > w0 >= 0, got b0={b0}, w0={w0}")
    if k_lead < 0 or k_trail < 0:
        raise UrnModelError("block lengths must be non-negative")
    initial = new_urn((b0, w0), rule)
    traj = Trajectory.from_draws(initial, rule, [0] * k_lead + [1] * k_trail)
    end_b = b0 + k_lead * rule.m[0]
    end_w = w0 + k_trail * rule.m[1]
    positive_throughout = (b0 - w0 > 0) and (end_b - end_w > 0)
    return traj, positive_throughout
