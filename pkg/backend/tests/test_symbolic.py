import itertools
import random
from fractions import Fraction

import pytest

from src.abstraction.alts import AbstractTransition
from src.abstraction.domain import Interval
from src.imc.symbolic import (
    Expr,
    RatePart,
    SymbolicRate,
    bound_ratio,
    constraint_union,
    merged_rates,
    sym_add,
    sym_rate,
)
from src.semantics.reactions import ReactionKind

from .conftest import astate


def _transition(kind, participants, delta, rate=1, theta=("l",)):
    return AbstractTransition(
        source=astate(),
        theta=theta,
        delta=tuple(Interval(lo, hi) for lo, hi in delta),
        rate_param=Fraction(rate),
        target=astate(),
        kind=kind,
        participants=participants,
    )


def _part(theta, expr, **guard):
    return RatePart(theta=(theta,), expr=expr, guard=tuple(sorted((n, Interval(*b)) for n, b in guard.items())))


def test_rate_of_each_reaction_kind():
    delay = sym_rate(_transition(ReactionKind.DELAY, ("X",), [(0, 3)], rate=2))
    homo = sym_rate(_transition(ReactionKind.HOMO, ("X", "X"), [(1, 3), (1, 3)]))
    hetero = sym_rate(_transition(ReactionKind.HETERO, ("X", "Y"), [(1, 2), (2, 2)]))

    assert (delay.e.render(), delay.c) == ("2*X", {"X": Interval(0, 3)})
    assert (homo.e.render(), homo.c) == ("X*(X-1)", {"X": Interval(1, 3)})
    assert (hetero.e.render(), hetero.c) == ("X*Y", {"X": Interval(1, 2), "Y": Interval(2, 2)})


def test_sum_adds_expressions_and_joins_constraints():
    # Arrange
    first = sym_rate(_transition(ReactionKind.DELAY, ("X",), [(1, 2)]))
    second = sym_rate(_transition(ReactionKind.DELAY, ("X",), [(2, 3)]))

    # Act
    total = sym_add(first, second)

    # Assert
    assert total.e == Expr.var("X").scale(Fraction(2))
    assert total.c == {"X": Interval(1, 3)}
    assert sym_add(first, SymbolicRate()).c == first.c


def test_constraint_union_keeps_unshared_variables():
    merged = constraint_union({"X": Interval(1, 1)}, {"Y": Interval(2, 2)})
    assert merged == {"X": Interval(1, 1), "Y": Interval(2, 2)}


def test_same_label_rates_are_merged():
    # Arrange
    first = _transition(ReactionKind.HETERO, ("X", "Y"), [(1, 2), (2, 2)], theta=("lam", "mu"))
    second = _transition(ReactionKind.HETERO, ("X", "Y"), [(1, 2), (1, 1)], theta=("lam", "mu"))

    # Act
    (merged,) = merged_rates([first, second])

    # Assert
    assert merged.c == {"X": Interval(1, 2), "Y": Interval(1, 2)}
    assert merged_rates([]) == []


def test_merging_inconsistent_expressions_fails():
    first = _transition(ReactionKind.DELAY, ("X",), [(1, 2)], rate=1)
    second = _transition(ReactionKind.DELAY, ("X",), [(1, 2)], rate=2)
    with pytest.raises(ValueError):
        merged_rates([first, second])


def test_corner_evaluation_handles_zero_and_infinity():
    expr = Expr.var("X") * Expr.var("Y")
    assert expr.evaluate_corner({"X": Interval(0, None), "Y": Interval(2, 3)}, upper=False) == 0
    assert expr.evaluate_corner({"X": Interval(1, None), "Y": Interval(2, 3)}, upper=True) is None
    assert Expr.falling("X").evaluate_corner({"X": Interval(1, 4)}, upper=False) == 0
    assert Expr.falling("X").evaluate_corner({"X": Interval(1, 4)}, upper=True) == 12


def test_ratio_is_exact_when_enumerable():
    # Arrange
    numerator = SymbolicRate((_part("x", Expr.var("X"), X=(1, 2)),))
    denominator = SymbolicRate((_part("x", Expr.var("X"), X=(1, 2)), _part("y", Expr.var("Y"), Y=(1, 2))))

    # Act
    bounds = bound_ratio(numerator, denominator)

    # Assert
    assert (bounds.lo, bounds.hi) == (Fraction(1, 3), Fraction(2, 3))
    assert bounds.exhaustive


def test_zero_numerator_gives_zero():
    denominator = SymbolicRate((_part("x", Expr.var("X"), X=(1, 2)),))
    bounds = bound_ratio(SymbolicRate(), denominator)
    assert (bounds.lo, bounds.hi) == (0, 0)


def test_fallback_is_wider_but_encloses():
    numerator = SymbolicRate((_part("x", Expr.var("X"), X=(1, 2)),))
    denominator = SymbolicRate((_part("x", Expr.var("X"), X=(1, 2)), _part("y", Expr.var("Y"), Y=(1, 2))))

    bounds = bound_ratio(numerator, denominator, enum_cap=1)

    assert not bounds.exhaustive
    assert (bounds.lo, bounds.hi) == (Fraction(1, 4), Fraction(1))


def test_unbounded_variables_use_the_fallback():
    numerator = SymbolicRate((_part("x", Expr.var("X"), X=(1, None)),))
    denominator = SymbolicRate((_part("x", Expr.var("X"), X=(1, None)), _part("y", Expr.var("Y"), Y=(1, 1))))

    bounds = bound_ratio(numerator, denominator)

    assert not bounds.exhaustive
    assert (bounds.lo, bounds.hi) == (0, 1)

def _random_moves(rng: random.Random):
    """Random abstract moves as (kind, participants, guard intervals, rate) tuples."""
    moves = []
    for _ in range(rng.randint(1, 4)):
        kind = rng.choice([ReactionKind.DELAY, ReactionKind.HOMO, ReactionKind.HETERO])
        if kind is ReactionKind.HETERO:
            participants = ("X", "Y")
        elif kind is ReactionKind.HOMO:
            participants = ("X", "X")
        else:
            participants = (rng.choice(["X", "Y"]),)
        delta = []
        for _ in range(1 if kind is ReactionKind.DELAY else 2):
            lo = rng.randint(0, 3)
            delta.append((lo, lo + rng.randint(0, 2)))
        moves.append((kind, participants, tuple(delta), rng.randint(1, 3)))
    return moves


def _mass_action(kind, participants, rate, valuation):
    if kind is ReactionKind.DELAY:
        return rate * valuation[participants[0]]
    if kind is ReactionKind.HOMO:
        x = valuation["X"]
        return rate * x * (x - 1)
    return rate * valuation["X"] * valuation["Y"]


def _guarded_names(participants):
    return participants[:1] if participants == ("X", "X") else participants


def _guard_holds(participants, delta, valuation):
    return all(lo <= valuation[name] <= hi for name, (lo, hi) in zip(_guarded_names(participants), delta))


def _in_box(moves, valuation):
    """Inside the join of every move's guard, variable by variable."""
    for name in ("X", "Y"):
        bounds = [
            (lo, hi)
            for _, participants, delta, _ in moves
            for who, (lo, hi) in zip(_guarded_names(participants), delta)
            if who == name
        ]
        if bounds and not min(lo for lo, _ in bounds) <= valuation[name] <= max(hi for _, hi in bounds):
            return False
    return True


@pytest.mark.parametrize("seed", range(200))
def test_ratio_bounds_enclose_every_concrete_ratio(seed):
    # Arrange
    rng = random.Random(seed)
    moves = _random_moves(rng)
    chosen = [k for k in range(len(moves)) if rng.random() < 0.5] or [0]
    as_rate = [
        sym_rate(_transition(kind, participants, delta, rate, theta=(f"t{k}",)))
        for k, (kind, participants, delta, rate) in enumerate(moves)
    ]
    numerator = SymbolicRate(tuple(part for k, r in enumerate(as_rate) if k in chosen for part in r.parts))
    denominator = SymbolicRate(tuple(part for r in as_rate for part in r.parts))

    # Act
    exact = bound_ratio(numerator, denominator, enum_cap=10_000)
    loose = bound_ratio(numerator, denominator, enum_cap=0)

    # Assert
    ratios = []
    for x, y in itertools.product(range(6), repeat=2):
        valuation = {"X": x, "Y": y}
        active = [moves[k] for k in chosen if _guard_holds(moves[k][1], moves[k][2], valuation)]
        if not active or not _in_box(moves, valuation):
            continue
        exit_rate = sum(_mass_action(kind, participants, rate, valuation) for kind, participants, _, rate in moves)
        if exit_rate == 0:
            continue
        flow = sum(_mass_action(kind, participants, rate, valuation) for kind, participants, _, rate in active)
        ratios.append(Fraction(flow, exit_rate))

    if not ratios:
        assert exact.hi == 0
        return
    assert exact.exhaustive
    assert exact.lo <= min(ratios)
    assert exact.hi == max(ratios)
    assert loose.lo <= exact.lo and exact.hi <= loose.hi
