from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.abstraction.alts import AbstractTransition
from src.abstraction.domain import Interval, interval_join
from src.semantics.reactions import ReactionKind, TransLabel, render_theta

logger = logging.getLogger(__name__)

# A factor is ("var", X) for X or ("falling", X) for X*(X-1) truncated at zero.
Factor = Tuple[str, str]
Monomial = Tuple[Factor, ...]
Constraints = Dict[str, Interval]
Valuation = Mapping[str, int]
Bound = Optional[Fraction]  # None is +infinity


def _factor_value(factor: Factor, value: Optional[int]) -> Bound:
    kind, _ = factor
    if value is None:
        return None
    if kind == "var":
        return Fraction(value)
    return Fraction(value * max(value - 1, 0))


@dataclass(frozen=True)
class Expr:
    """Polynomial with nonnegative coefficients over var / falling factors, in canonical form."""

    terms: Tuple[Tuple[Monomial, Fraction], ...] = ()

    @staticmethod
    def _canonical(pairs: Iterable[Tuple[Monomial, Fraction]]) -> "Expr":
        merged: Dict[Monomial, Fraction] = {}
        for monomial, coefficient in pairs:
            key = tuple(sorted(monomial))
            merged[key] = merged.get(key, Fraction(0)) + coefficient
        return Expr(tuple(sorted((m, c) for m, c in merged.items() if c != 0)))

    @classmethod
    def constant(cls, value: Fraction) -> "Expr":
        return cls._canonical([((), Fraction(value))])

    @classmethod
    def var(cls, name: str) -> "Expr":
        return cls._canonical([((("var", name),), Fraction(1))])

    @classmethod
    def falling(cls, name: str) -> "Expr":
        return cls._canonical([((("falling", name),), Fraction(1))])

    def __add__(self, other: "Expr") -> "Expr":
        return Expr._canonical(list(self.terms) + list(other.terms))

    def __mul__(self, other: "Expr") -> "Expr":
        return Expr._canonical(
            (left + right, a * b) for (left, a), (right, b) in itertools.product(self.terms, other.terms)
        )

    def scale(self, factor: Fraction) -> "Expr":
        return Expr._canonical((m, c * factor) for m, c in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> Tuple[str, ...]:
        return tuple(sorted({name for monomial, _ in self.terms for _, name in monomial}))

    def evaluate(self, valuation: Valuation) -> Fraction:
        total = Fraction(0)
        for monomial, coefficient in self.terms:
            product = coefficient
            for factor in monomial:
                product *= _factor_value(factor, valuation[factor[1]])  # type: ignore[operator]
            total += product
        return total

    def evaluate_corner(self, box: Mapping[str, Interval], upper: bool) -> Bound:
        """
        Value at the lower or upper corner of `box`. Every factor is nondecreasing on the
        naturals, so these are the minimum and maximum over the box.
        """
        total = Fraction(0)
        for monomial, coefficient in self.terms:
            values = [
                _factor_value(factor, box[factor[1]].hi if upper else box[factor[1]].lo) for factor in monomial
            ]
            if any(value == 0 for value in values if value is not None):
                continue
            if any(value is None for value in values):
                return None
            product = coefficient
            for value in values:
                product *= value  # type: ignore[operator]
            total += product
        return total

    def render(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for monomial, coefficient in self.terms:
            factors = [name if kind == "var" else f"{name}*({name}-1)" for kind, name in monomial]
            if coefficient != 1 or not factors:
                factors.insert(0, str(coefficient))
            pieces.append("*".join(factors))
        return " + ".join(pieces)


@dataclass(frozen=True)
class RatePart:
    """The rate of one abstract transition, valid where `guard` holds."""

    theta: TransLabel
    expr: Expr
    guard: Tuple[Tuple[str, Interval], ...]
    zeroed: bool = False

    def guard_map(self) -> Constraints:
        return dict(self.guard)

    def holds(self, valuation: Valuation) -> bool:
        return all(interval.contains(valuation[name]) for name, interval in self.guard)


@dataclass(frozen=True)
class SymbolicRate:
    """
    Sum of guarded rate parts. `e` is the plain sum of the parts' expressions and `c` the
    per-variable join of their guards, a zeroed part contributing [0,0] for its variables.
    Evaluation keeps the guards: see `guarded`.
    """

    parts: Tuple[RatePart, ...] = ()

    @property
    def e(self) -> Expr:
        total = Expr()
        for part in self.parts:
            total = total + part.expr
        return total

    @property
    def c(self) -> Constraints:
        merged: Constraints = {}
        for part in self.parts:
            guard = part.guard_map()
            if part.zeroed:
                guard = {name: Interval(0, 0) for name in guard}
            merged = constraint_union(merged, guard)
        return merged

    def variables(self) -> Tuple[str, ...]:
        return tuple(sorted({name for part in self.parts for name, _ in part.guard}))

    def is_zero(self) -> bool:
        return all(part.expr.is_zero() for part in self.parts)

    def plain(self, valuation: Valuation) -> Fraction:
        return self.e.evaluate(valuation)

    def guarded(self, valuation: Valuation) -> Fraction:
        return sum((part.expr.evaluate(valuation) for part in self.parts if part.holds(valuation)), Fraction(0))

    def render(self) -> str:
        constraints = ", ".join(f"{name}∈{interval}" for name, interval in sorted(self.c.items()))
        return f"({self.e.render()}, {{{constraints}}})"


def constraint_union(first: Mapping[str, Interval], second: Mapping[str, Interval]) -> Constraints:
    merged: Constraints = dict(first)
    for name, interval in second.items():
        merged[name] = interval_join(merged[name], interval) if name in merged else interval
    return merged


def sym_rate(transition: AbstractTransition) -> SymbolicRate:
    r = Expr.constant(transition.rate_param)
    if transition.kind is ReactionKind.DELAY:
        (name,) = _participant_names(transition)
        expr = Expr.var(name) * r
        guard = ((name, transition.delta[0]),)
    elif transition.kind is ReactionKind.HOMO:
        (name,) = _participant_names(transition)
        expr = Expr.falling(name) * r
        guard = ((name, transition.delta[0]),)
    else:
        first, second = _participant_names(transition)
        expr = Expr.var(first) * Expr.var(second) * r
        guard = tuple(sorted(((first, transition.delta[0]), (second, transition.delta[1]))))
    return SymbolicRate((RatePart(theta=transition.theta, expr=expr, guard=guard),))


def _participant_names(transition: AbstractTransition) -> Tuple[str, ...]:
    names = transition.participants
    if not names:
        raise ValueError(f"Transition {transition.render()} does not carry participant names")
    return names if transition.kind is not ReactionKind.HOMO else names[:1]


def sym_add(first: SymbolicRate, second: SymbolicRate) -> SymbolicRate:
    return SymbolicRate(first.parts + second.parts)


def sym_sum(rates: Iterable[SymbolicRate]) -> SymbolicRate:
    total = SymbolicRate()
    for rate in rates:
        total = sym_add(total, rate)
    return total


def merged_rates(transitions: Sequence[AbstractTransition]) -> List[SymbolicRate]:
    """One rate per label, same-label guards joined variable by variable."""
    by_label: Dict[TransLabel, RatePart] = {}
    for transition in transitions:
        (part,) = sym_rate(transition).parts
        existing = by_label.get(part.theta)
        if existing is None:
            by_label[part.theta] = part
            continue
        if existing.expr != part.expr:
            raise ValueError(f"Inconsistent rate expressions under label {render_theta(part.theta)}")
        guard = constraint_union(existing.guard_map(), part.guard_map())
        by_label[part.theta] = RatePart(theta=part.theta, expr=part.expr, guard=tuple(sorted(guard.items())))
    return [SymbolicRate((part,)) for part in by_label.values()]


@dataclass(frozen=True)
class RatioBounds:
    lo: Fraction
    hi: Fraction
    exhaustive: bool
    numerator_min: Bound = None


def _intersect(first: Interval, second: Interval) -> Optional[Interval]:
    lo = max(first.lo, second.lo)
    if first.hi is None:
        hi = second.hi
    elif second.hi is None:
        hi = first.hi
    else:
        hi = min(first.hi, second.hi)
    if hi is not None and hi < lo:
        return None
    return Interval(lo, hi)


def ratio_domain(numerator: SymbolicRate, denominator: SymbolicRate) -> Optional[Constraints]:
    """
    Valuations shared by both expressions: the denominator's joined box, narrowed to the
    hull of the guards of the numerator's non-zeroed parts. None when empty.
    """
    box = dict(denominator.c)
    for name, interval in numerator.c.items():
        box.setdefault(name, interval)
    mandatory: Constraints = {}
    for part in numerator.parts:
        if not part.zeroed:
            mandatory = constraint_union(mandatory, part.guard_map())
    for name, interval in mandatory.items():
        narrowed = _intersect(box[name], interval)
        if narrowed is None:
            return None
        box[name] = narrowed
    return box


def _divide(numerator: Bound, denominator: Bound, *, upper: bool) -> Fraction:
    if upper:
        if numerator is None or denominator == 0:
            return Fraction(1)
        if denominator is None:
            return Fraction(0) if numerator == 0 else Fraction(1)
        return min(numerator / denominator, Fraction(1))
    if numerator == 0 or denominator is None or denominator == 0:
        return Fraction(0)
    if numerator is None:
        return Fraction(1)
    return min(numerator / denominator, Fraction(1))


def _fallback(numerator: SymbolicRate, denominator: SymbolicRate, box: Constraints) -> RatioBounds:
    r_lo = Fraction(0)
    r_hi: Bound = Fraction(0)
    for part in numerator.parts:
        guard = part.guard_map()
        clipped: Constraints = {}
        for name, interval in guard.items():
            narrowed = _intersect(box[name], interval)
            if narrowed is None:
                break
            clipped[name] = narrowed
        else:
            always_active = all(clipped[name] == box[name] for name in guard)
            if always_active and not part.zeroed:
                r_lo += part.expr.evaluate_corner(box, upper=False) or 0
            top = part.expr.evaluate_corner(clipped, upper=True)
            r_hi = None if top is None or r_hi is None else r_hi + top
    e_lo = denominator.e.evaluate_corner(box, upper=False)
    e_hi = denominator.e.evaluate_corner(box, upper=True)
    lo = _divide(r_lo, e_hi, upper=False)
    hi = _divide(r_hi, e_lo, upper=True)
    return RatioBounds(lo=min(lo, hi), hi=hi, exhaustive=False, numerator_min=r_lo)


def bound_ratio(numerator: SymbolicRate, denominator: SymbolicRate, enum_cap: int = 4096) -> RatioBounds:
    """
    Enclosure of numerator(v)/denominator(v) over the shared valuations v with a positive
    denominator. Exact by enumeration when the domain has at most `enum_cap` points.
    """
    if numerator.is_zero():
        return RatioBounds(Fraction(0), Fraction(0), True, Fraction(0))
    box = ratio_domain(numerator, denominator)
    if box is None:
        return RatioBounds(Fraction(0), Fraction(0), True, Fraction(0))

    names = sorted(box)
    size = 1
    for name in names:
        width = box[name].width()
        size = None if width is None or size is None else size * width
    if size is None or size > enum_cap:
        logger.debug("bound_ratio fallback over %s (size %s, cap %d)", names, size, enum_cap)
        return _fallback(numerator, denominator, box)

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    r_min: Optional[Fraction] = None
    for point in itertools.product(*(box[name].values() for name in names)):
        valuation = dict(zip(names, point))
        r = numerator.guarded(valuation)
        r_min = r if r_min is None else min(r_min, r)
        e = denominator.plain(valuation)
        if e == 0:
            continue
        ratio = r / e
        lo = ratio if lo is None else min(lo, ratio)
        hi = ratio if hi is None else max(hi, ratio)
    if lo is None or hi is None:
        return RatioBounds(Fraction(0), Fraction(0), True, r_min)
    return RatioBounds(lo=min(lo, Fraction(1)), hi=min(hi, Fraction(1)), exhaustive=True, numerator_min=r_min)
