"""Discrete urn: states, draws, dominance criteria, two-block paths."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyaurn.errors import UrnModelError
from polyaurn.rng import UniformStream
from polyaurn.urn import (
    CRITERION_KINDS,
    DominanceCriterion,
    ReplacementRule,
    Trajectory,
    UrnState,
    check_dominance_prefix,
    draw_step,
    new_urn,
    pick_colour,
    run_trajectory,
    two_block_path,
)


class TestReplacementRule:
    def test_valid(self):
        rule = ReplacementRule((2, 1))
        assert rule.q == 2
        assert rule.m == (2, 1)

    def test_rejects_single_colour(self):
        with pytest.raises(UrnModelError):
            ReplacementRule((3,))

    def test_rejects_nonpositive_entries(self):
        with pytest.raises(UrnModelError):
            ReplacementRule((1, 0))
        with pytest.raises(UrnModelError):
            ReplacementRule((1, -2))

    def test_accepts_many_colours(self):
        assert ReplacementRule((1,) * 5).q == 5


class TestNewUrn:
    def test_two_colour_allows_one_empty(self):
        state = new_urn((2, 0), ReplacementRule((1, 1)))
        assert state == UrnState((2, 0), 0)
        assert state.total == 2

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(UrnModelError, match="dimension"):
            new_urn((1, 1, 1), ReplacementRule((1, 1)))

    def test_rejects_negative(self):
        with pytest.raises(UrnModelError):
            new_urn((-1, 2), ReplacementRule((1, 1)))

    def test_rejects_empty_urn(self):
        with pytest.raises(UrnModelError, match="empty"):
            new_urn((0, 0), ReplacementRule((1, 1)))

    def test_three_colours_need_every_colour(self):
        with pytest.raises(UrnModelError):
            new_urn((1, 0, 1), ReplacementRule((1, 1, 1)))
        assert new_urn((1, 1, 1), ReplacementRule((1, 1, 1))).total == 3


class TestPickColour:
    def test_proportional_split(self):
        counts = (2, 1)
        assert pick_colour(counts, 3, 0.1) == 0
        assert pick_colour(counts, 3, 0.6) == 0
        assert pick_colour(counts, 3, 0.7) == 1
        assert pick_colour(counts, 3, 0.99) == 1

    def test_never_picks_empty_colour(self):
        for k in range(1, 200):
            u = k / 200.0
            assert pick_colour((0, 5), 5, u) == 1
            assert pick_colour((5, 0), 5, u) == 0
            assert pick_colour((0, 3, 2), 5, u) in (1, 2)

    def test_rounding_edge_falls_to_last_positive(self):
        # u close enough to 1 that u * total == total in floating point
        u = 1.0 - 2.0**-54
        assert pick_colour((1, 1), 2, u) == 1
        assert pick_colour((1, 1, 0), 2, u) == 1


class TestDrawStep:
    def test_updates_counts_and_step(self):
        rule = ReplacementRule((2, 1))
        state = new_urn((2, 1), rule)
        colour, nxt = draw_step(state, rule, UniformStream(7))
        assert colour in (0, 1)
        assert nxt.step == 1
        assert nxt.counts[colour] == state.counts[colour] + rule.m[colour]
        other = 1 - colour
        assert nxt.counts[other] == state.counts[other]

    def test_empty_urn_rejected(self):
        rule = ReplacementRule((1, 1))
        with pytest.raises(UrnModelError):
            draw_step(UrnState((0, 0), 0), rule, UniformStream(0))


class TestRunTrajectory:
    def test_shape_and_growth(self):
        rule = ReplacementRule((2, 3))
        state = new_urn((1, 1), rule)
        traj = run_trajectory(state, rule, 25, UniformStream(3))
        assert len(traj.draws) == len(traj.states) == 25
        assert traj.all_states()[0] == state
        assert traj.final_state.step == 25
        total = state.total
        for colour, st in zip(traj.draws, traj.states):
            total += rule.m[colour]
            assert st.total == total

    def test_zero_steps(self):
        rule = ReplacementRule((1, 1))
        state = new_urn((2, 1), rule)
        traj = run_trajectory(state, rule, 0, UniformStream(0))
        assert traj.draws == []
        assert traj.final_state == state

    def test_deterministic_for_seed(self):
        rule = ReplacementRule((1, 2))
        state = new_urn((3, 2), rule)
        a = run_trajectory(state, rule, 50, UniformStream(11))
        b = run_trajectory(state, rule, 50, UniformStream(11))
        assert a.draws == b.draws
        assert a.states == b.states

    def test_rejects_negative_steps(self):
        rule = ReplacementRule((1, 1))
        with pytest.raises(UrnModelError):
            run_trajectory(new_urn((1, 1), rule), rule, -1, UniformStream(0))


class TestDominanceCriterion:
    def test_kinds_registry(self):
        assert CRITERION_KINDS == ("strict", "majority", "plurality")

    def test_strict_requires_two_colours(self):
        with pytest.raises(UrnModelError):
            DominanceCriterion("strict").validate_for(3)
        DominanceCriterion("strict").validate_for(2)

    def test_focus_range_checked(self):
        with pytest.raises(UrnModelError):
            DominanceCriterion("majority", focus=3).validate_for(3)
        with pytest.raises(UrnModelError):
            DominanceCriterion("majority", focus=-1).validate_for(3)

    def test_unknown_kind_rejected(self):
        with pytest.raises(UrnModelError):
            DominanceCriterion("lead")

    def test_strict_semantics_tie_fails(self):
        crit = DominanceCriterion("strict")
        assert crit.satisfied((2, 1))
        assert not crit.satisfied((1, 1))
        assert not crit.satisfied((1, 2))

    def test_strict_focus_one(self):
        crit = DominanceCriterion("strict", focus=1)
        assert crit.satisfied((1, 2))
        assert not crit.satisfied((2, 1))

    def test_majority_semantics(self):
        crit = DominanceCriterion("majority")
        assert crit.satisfied((3, 1, 1))
        assert not crit.satisfied((2, 1, 1))  # exactly half fails
        assert not crit.satisfied((1, 2, 2))

    def test_plurality_semantics_tie_fails(self):
        crit = DominanceCriterion("plurality")
        assert crit.satisfied((3, 2, 2))
        assert not crit.satisfied((2, 2, 1))
        assert crit.satisfied((2, 1, 1))


class TestCheckDominancePrefix:
    def test_initial_violation_is_step_zero(self):
        rule = ReplacementRule((1, 1))
        traj = Trajectory.from_draws(new_urn((1, 2), rule), rule, [0, 0])
        holds, first = check_dominance_prefix(traj, DominanceCriterion("strict"))
        assert (holds, first) == (False, 0)

    def test_failure_step_is_exact(self):
        rule = ReplacementRule((1, 1))
        # (2,1) -> draw 1 -> (2,2) tie at step 1
        traj = Trajectory.from_draws(new_urn((2, 1), rule), rule, [1, 0, 0])
        holds, first = check_dominance_prefix(traj, DominanceCriterion("strict"))
        assert (holds, first) == (False, 1)

    def test_holds_throughout(self):
        rule = ReplacementRule((2, 1))
        # (2,1) -> (4,1) -> (4,2) -> (4,3): strictly ahead at every step
        traj = Trajectory.from_draws(new_urn((2, 1), rule), rule, [0, 1, 1])
        holds, first = check_dominance_prefix(traj, DominanceCriterion("strict"))
        assert (holds, first) == (True, None)

    @settings(max_examples=150, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=2), max_size=12),
        st.sampled_from(["majority", "plurality"]),
    )
    def test_matches_scan_of_all_states(self, draws, kind):
        rule = ReplacementRule((2, 1, 3))
        traj = Trajectory.from_draws(new_urn((2, 1, 1), rule), rule, draws)
        crit = DominanceCriterion(kind)
        holds, first = check_dominance_prefix(traj, crit)
        flags = [crit.satisfied(st_.counts) for st_ in traj.all_states()]
        assert holds == all(flags)
        if holds:
            assert first is None
        else:
            assert flags[first] is False and all(flags[:first])


class TestTwoBlockPath:
    def test_matches_explicit_construction(self):
        rule = ReplacementRule((1, 1))
        traj, positive = two_block_path(2, 1, rule, 2, 1)
        assert [s.counts for s in traj.all_states()] == [
            (2, 1), (3, 1), (4, 1), (4, 2),
        ]
        assert positive

    def test_endpoint_flag_examples(self):
        rule = ReplacementRule((1, 3))
        _, positive = two_block_path(2, 1, rule, 1, 1)
        assert not positive  # ends at (3, 4)
        _, positive = two_block_path(2, 1, rule, 3, 0)
        assert positive

    def test_flag_equals_step_scan(self):
        crit = DominanceCriterion("strict")
        for m in ((1, 1), (2, 1), (1, 3), (5, 2)):
            rule = ReplacementRule(m)
            for kb in range(0, 6):
                for kw in range(0, 6):
                    traj, positive = two_block_path(3, 1, rule, kb, kw)
                    holds, _ = check_dominance_prefix(traj, crit)
                    assert positive == holds

    def test_preconditions(self):
        rule = ReplacementRule((1, 1))
        with pytest.raises(UrnModelError):
            two_block_path(1, 1, rule, 1, 1)
        with pytest.raises(UrnModelError):
            two_block_path(1, 0, rule, -1, 0)
        with pytest.raises(UrnModelError):
            two_block_path(1, 0, ReplacementRule((1, 1, 1)), 1, 1)

    def test_zero_blocks(self):
        rule = ReplacementRule((2, 1))
        traj, positive = two_block_path(1, 0, rule, 0, 0)
        assert traj.final_state.counts == (1, 0)
        assert positive


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**64 - 1),
    st.tuples(st.integers(1, 4), st.integers(1, 4)),
)
def test_trajectory_counts_stay_on_lattice(seed, m):
    rule = ReplacementRule(m)
    state = new_urn((2, 1), rule)
    traj = run_trajectory(state, rule, 15, UniformStream(seed))
    k0 = traj.draws.count(0)
    k1 = traj.draws.count(1)
    assert traj.final_state.counts == (2 + k0 * m[0], 1 + k1 * m[1])
