import itertools
import random

import pytest

from src.abstraction.domain import (
    AbstractState,
    Interval,
    Polarity,
    SplitTag,
    alpha_set,
    alpha_state,
    astate_diff,
    astate_sum,
    gamma_contains,
    gamma_count,
    gamma_enumerate,
    interval_add,
    interval_join,
    interval_leq,
    interval_sub,
    split_applies,
    split_interval,
    split_state,
    state_join,
    state_leq,
)
from src.cgf.errors import EnumerationError
from src.cgf.multiset import Multiset

from .conftest import astate


def test_interval_order_and_join():
    assert interval_leq(Interval(1, 2), Interval(0, 3))
    assert not interval_leq(Interval(0, 3), Interval(1, 2))
    assert interval_leq(Interval(5, 9), Interval(1, None))
    assert interval_join(Interval(1, 2), Interval(2, 3)) == Interval(1, 3)
    assert interval_join(Interval(1, 2), Interval(4, None)) == Interval(1, None)


def test_interval_subtraction_is_truncated():
    assert interval_sub(Interval(1, 2), Interval(1, 1)) == Interval(0, 1)
    assert interval_sub(Interval(0, 0), Interval(1, 1)) == Interval(0, 0)
    assert interval_sub(Interval(3, None), Interval(1, 1)) == Interval(2, None)
    assert interval_sub(Interval(2, 4), Interval(0, None)) == Interval(0, 4)


def test_empty_interval_is_rejected():
    with pytest.raises(ValueError):
        Interval(3, 2)


def test_absent_species_read_as_zero():
    state = astate(X=(1, 2))
    assert state["Y"] == Interval(0, 0)
    assert state == astate(X=(1, 2), Y=(0, 0))


def test_state_order_join_and_arithmetic():
    # Arrange
    small = astate(X=(1, 1), Y=(2, 2))
    big = astate(X=(1, 2), Y=(1, 2))

    # Act / Assert
    assert state_leq(small, big)
    assert not state_leq(big, small)
    assert state_join(small, astate(X=(2, 3))) == astate(X=(1, 3), Y=(0, 2))
    assert astate_sum(big, alpha_state(Multiset({"X": 2}))) == astate(X=(3, 4), Y=(1, 2))
    assert astate_diff(big, alpha_state(Multiset({"X": 1, "Y": 1}))) == astate(X=(0, 1), Y=(0, 1))


def test_alpha_and_gamma():
    # Arrange
    markings = [Multiset({"X": 1, "Y": 2}), Multiset({"X": 2, "Y": 1})]

    # Act
    joined = alpha_set(markings)

    # Assert
    assert joined == astate(X=(1, 2), Y=(1, 2))
    assert all(gamma_contains(joined, m) for m in markings)
    assert not gamma_contains(joined, Multiset({"X": 3}))
    assert gamma_count(joined) == 4
    assert gamma_count(astate(X=(0, None))) is None


def test_alpha_set_needs_input():
    with pytest.raises(ValueError):
        alpha_set([])


def test_gamma_enumeration_is_lexicographic():
    members = list(gamma_enumerate(astate(X=(1, 2), Y=(0, 1)), cap=10))
    assert members == [
        Multiset({"X": 1}),
        Multiset({"X": 1, "Y": 1}),
        Multiset({"X": 2}),
        Multiset({"X": 2, "Y": 1}),
    ]


def test_gamma_enumeration_refuses_large_or_infinite_sets():
    with pytest.raises(EnumerationError):
        gamma_enumerate(astate(X=(0, None)), cap=100)
    with pytest.raises(EnumerationError) as excinfo:
        gamma_enumerate(astate(X=(0, 9), Y=(0, 9)), cap=50)
    assert excinfo.value.count == 100


def test_split_operators():
    # Arrange
    state = astate(X=(0, 2), Y=(1, 1))

    # Act
    zero = split_state(state, SplitTag("X", Polarity.ZERO))
    positive = split_state(state, SplitTag("X", Polarity.POSITIVE))

    # Assert
    assert zero == astate(Y=(1, 1))
    assert positive == astate(X=(1, 2), Y=(1, 1))
    assert split_state(state, SplitTag("Y", Polarity.ZERO)) == state
    assert split_applies(Interval(0, None))
    assert not split_applies(Interval(0, 0))


def test_split_interval_clips_source_multiplicities():
    zero, positive = SplitTag("X", Polarity.ZERO), SplitTag("X", Polarity.POSITIVE)
    assert split_interval(Interval(1, 2), zero) == Interval(1, 1)
    assert split_interval(Interval(1, 2), positive) == Interval(2, 2)
    assert split_interval(Interval(1, 3), zero, consumed=2) == Interval(1, 2)
    assert split_interval(Interval(1, 3), positive, consumed=2) == Interval(3, 3)
    assert split_interval(Interval(0, None), positive) == Interval(2, None)


COUNT_LIMIT = 9
NAMES = ("X", "Y")
BOUNDED = [Interval(lo, hi) for lo in range(6) for hi in range(lo, 6)]
ALL_INTERVALS = BOUNDED + [Interval(lo, None) for lo in range(6)]


def _random_interval(rng: random.Random) -> Interval:
    lo = rng.randint(0, 3)
    return Interval(lo, None if rng.random() < 0.2 else lo + rng.randint(0, 3))


def _random_state(rng: random.Random) -> AbstractState:
    return AbstractState({name: _random_interval(rng) for name in NAMES})


def _members(interval: Interval) -> range:
    return range(interval.lo, COUNT_LIMIT if interval.hi is None else interval.hi + 1)


@pytest.mark.parametrize("seed", range(10))
def test_interval_arithmetic_covers_every_pointwise_result(seed):
    rng = random.Random(seed)
    for _ in range(50):
        # Arrange
        first, second = _random_interval(rng), _random_interval(rng)

        # Act
        total = interval_add(first, second)
        difference = interval_sub(first, second)

        # Assert
        for a, b in itertools.product(_members(first), _members(second)):
            assert total.contains(a + b), (first, second, a, b)
            assert difference.contains(max(a - b, 0)), (first, second, a, b)


@pytest.mark.parametrize("seed", range(10))
def test_state_order_is_a_partial_order(seed):
    rng = random.Random(seed)
    states = [_random_state(rng) for _ in range(30)]
    for a in states:
        assert state_leq(a, a)
    for a, b in itertools.product(states, repeat=2):
        if state_leq(a, b) and state_leq(b, a):
            assert a == b
    for a, b, c in itertools.product(states, repeat=3):
        if state_leq(a, b) and state_leq(b, c):
            assert state_leq(a, c)


def _clamp(candidate: Interval, outer: Interval) -> Interval:
    """Clamp `candidate` into `outer`, falling back to `outer` when they do not overlap."""
    lo = max(candidate.lo, outer.lo)
    hi = candidate.hi if outer.hi is None else outer.hi if candidate.hi is None else min(candidate.hi, outer.hi)
    if hi is not None and hi < lo:
        return outer
    return Interval(lo, hi)


@pytest.mark.parametrize("seed", range(10))
def test_concretization_is_monotone(seed):
    rng = random.Random(seed)
    markings = [Multiset(dict(zip(NAMES, counts))) for counts in itertools.product(range(COUNT_LIMIT), repeat=2)]
    for _ in range(100):
        # Arrange
        small, big = _random_state(rng), _random_state(rng)
        if not state_leq(small, big):
            small = AbstractState({name: _clamp(small[name], big[name]) for name in NAMES})

        # Assert
        assert state_leq(small, big)
        for marking in markings:
            if gamma_contains(small, marking):
                assert gamma_contains(big, marking), (small, big, marking)


@pytest.mark.parametrize("consumed", [1, 2, 3])
def test_split_branches_partition_every_interval(consumed):
    zero, positive = SplitTag("X", Polarity.ZERO), SplitTag("X", Polarity.POSITIVE)
    for interval in ALL_INTERVALS:
        # Act
        low = split_interval(interval, zero, consumed)
        high = split_interval(interval, positive, consumed)

        # Assert
        for branch in (low, high):
            assert branch.hi is None or branch.lo <= branch.hi
            assert interval_leq(branch, interval)
        assert (interval.hi is None) == (low.hi is None or high.hi is None)
        for n in range(COUNT_LIMIT + 3):
            assert interval.contains(n) == (low.contains(n) or high.contains(n)), (interval, consumed, n)
