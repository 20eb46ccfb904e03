from dataclasses import replace

from src.abstraction.alts import abstract_enabled, best_abstraction_lts, explore, may_fire
from src.abstraction.domain import Interval, alpha_state, gamma_enumerate
from src.abstraction.simulation import check_simulation
from src.analysis.sweep import hybrid_states
from src.cgf.parser import parse_model
from src.semantics.lts import build_lts

from .conftest import astate

M0 = astate(X=(1, 2), Y=(1, 2))
A = astate(X=(2, 3))
B = astate(X=(2, 3), Y=(1, 1))
C = astate(Y=(2, 3))
D = astate(X=(1, 1), Y=(2, 3))
E = astate(X=(3, 4))
H = astate(Y=(3, 4))


def _moves(env, state):
    return {(t.theta, t.delta, t.target) for t in abstract_enabled(env, state) if may_fire(t)}


def test_initial_state_splits_into_four_branches(groupies_family):
    # Arrange
    env, initial = groupies_family

    # Act
    moves = _moves(env, initial)

    # Assert
    assert moves == {
        (("lam", "mu"), (Interval(1, 2), Interval(2, 2)), B),
        (("lam", "mu"), (Interval(1, 2), Interval(1, 1)), A),
        (("eta", "del"), (Interval(1, 2), Interval(1, 1)), C),
        (("eta", "del"), (Interval(1, 2), Interval(2, 2)), D),
    }


def test_branches_record_their_split_tags(groupies_family):
    env, initial = groupies_family
    tags = {str(tag) for t in abstract_enabled(env, initial) for tag in t.split_tags}
    assert tags == {"(Y=0)", "(Y>0)", "(X=0)", "(X>0)"}


def test_exhausted_states_have_no_firing_moves(groupies_family):
    env, _ = groupies_family
    assert _moves(env, A) == set()
    assert _moves(env, H) == set()


def test_widened_groupies_has_seven_states(groupies_alts):
    # Arrange / Act
    alts = groupies_alts

    # Assert
    assert len(alts.states) == 7
    assert set(alts.states) == {M0, A, B, C, D, E, H}
    assert alts.states[0] == M0
    assert set(alts.successors(M0)) == {A, B, C, D}
    assert set(alts.successors(D)) == {M0, H}
    assert set(alts.successors(B)) == {M0, E}
    assert alts.replacements == [
        (astate(X=(2, 2), Y=(1, 2)), M0),
        (astate(X=(1, 2), Y=(2, 2)), M0),
    ]


def test_unwidened_groupies_has_sixteen_states(groupies_family):
    env, initial = groupies_family
    alts = explore(env, initial, widening=False)
    assert len(alts.states) == 16
    assert alts.replacements == []


def test_exploration_is_deterministic(groupies_family):
    env, initial = groupies_family
    first = explore(env, initial, workers=1)
    second = explore(env, initial, workers=4)
    assert first.states == second.states
    assert [t.render() for t in first.transitions] == [t.render() for t in second.transitions]


def test_exact_start_mirrors_the_concrete_lts(groupies):
    # Arrange
    env, initial = groupies

    # Act
    alts = explore(env, alpha_state(initial), widening=False)
    concrete = best_abstraction_lts(build_lts(env, initial))

    # Assert
    assert set(alts.states) == set(concrete.states)
    assert {(t.source, t.theta, t.delta, t.target) for t in alts.transitions} == {
        (t.source, t.theta, t.delta, t.target) for t in concrete.transitions
    }


def test_members_are_simulated_by_the_family(groupies_family, groupies_alts):
    env, initial = groupies_family
    for marking in gamma_enumerate(initial, cap=16):
        concrete = best_abstraction_lts(build_lts(env, marking))
        assert check_simulation(concrete, groupies_alts)


def test_widening_replacements_simulate_the_unwidened_search(groupies_family, groupies_alts):
    env, _ = groupies_family
    for computed, replacement in groupies_alts.replacements:
        precise = explore(env, computed, widening=False)
        coarse = replace(groupies_alts, initial=replacement)
        assert check_simulation(precise, coarse)


def test_widened_groupies_has_no_hybrid_states(groupies_alts):
    assert hybrid_states(groupies_alts, cap=100) == []


def test_initial_state_may_be_hybrid():
    env, initial = parse_model("species X = tau(1).0\ninit X:[0,2]")
    alts = explore(env, initial)
    assert hybrid_states(alts, cap=100) == [0]
