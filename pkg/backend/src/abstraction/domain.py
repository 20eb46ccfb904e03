from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from src.cgf.errors import EnumerationError
from src.cgf.multiset import Multiset

__all__ = [
    "Interval",
    "AbstractState",
    "Polarity",
    "SplitTag",
    "interval_leq",
    "interval_join",
    "interval_add",
    "interval_sub",
    "state_leq",
    "state_join",
    "astate_sum",
    "astate_diff",
    "alpha_state",
    "alpha_set",
    "gamma_contains",
    "gamma_count",
    "gamma_enumerate",
    "split_state",
    "split_interval",
]


@dataclass(frozen=True, order=False)
class Interval:
    """Integer interval [lo, hi]; hi=None stands for infinity."""

    lo: int
    hi: Optional[int]

    def __post_init__(self) -> None:
        if self.lo < 0:
            raise ValueError(f"Interval lower bound must be a natural number, got {self.lo}")
        if self.hi is not None and self.hi < self.lo:
            raise ValueError(f"Empty interval [{self.lo},{self.hi}]")

    @classmethod
    def exact(cls, n: int) -> "Interval":
        return cls(n, n)

    @property
    def is_finite(self) -> bool:
        return self.hi is not None

    @property
    def is_exact(self) -> bool:
        return self.hi == self.lo

    def contains(self, n: int) -> bool:
        return self.lo <= n and (self.hi is None or n <= self.hi)

    def width(self) -> Optional[int]:
        """Number of integers inside, None when unbounded."""
        return None if self.hi is None else self.hi - self.lo + 1

    def values(self) -> range:
        if self.hi is None:
            raise EnumerationError(None, 0)
        return range(self.lo, self.hi + 1)

    def key(self) -> Tuple[int, int, int]:
        return (self.lo, 1 if self.hi is None else 0, self.hi or 0)

    def __str__(self) -> str:
        return f"[{self.lo},{'inf' if self.hi is None else self.hi}]"

    __repr__ = __str__


ZERO = Interval(0, 0)


def _hi_le(a: Optional[int], b: Optional[int]) -> bool:
    if b is None:
        return True
    return a is not None and a <= b


def interval_leq(first: Interval, second: Interval) -> bool:
    return second.lo <= first.lo and _hi_le(first.hi, second.hi)


def interval_join(first: Interval, second: Interval) -> Interval:
    if first.hi is None or second.hi is None:
        hi = None
    else:
        hi = max(first.hi, second.hi)
    return Interval(min(first.lo, second.lo), hi)


def interval_add(first: Interval, second: Interval) -> Interval:
    hi = None if first.hi is None or second.hi is None else first.hi + second.hi
    return Interval(first.lo + second.lo, hi)


def interval_sub(first: Interval, second: Interval) -> Interval:
    """Truncated subtraction [lo1 - hi2, hi1 - lo2] with n - inf = 0 and inf - n = inf."""
    lo = 0 if second.hi is None else max(first.lo - second.hi, 0)
    hi = None if first.hi is None else max(first.hi - second.lo, 0)
    if hi is not None and hi < lo:
        hi = lo
    return Interval(lo, hi)


class AbstractState:
    """
    Total map species -> Interval. Species absent from the map are [0,0]; those entries
    are never stored, so equality and hashing are pointwise.
    """

    __slots__ = ("_items",)

    def __init__(self, bounds: Mapping[str, Interval] | Iterable[Tuple[str, Interval]] = ()) -> None:
        pairs = bounds.items() if isinstance(bounds, Mapping) else bounds
        stored: Dict[str, Interval] = {}
        for name, interval in pairs:
            if name in stored:
                raise ValueError(f"Species {name} bound twice")
            stored[name] = interval
        items = tuple(sorted((n, i) for n, i in stored.items() if i != ZERO))
        object.__setattr__(self, "_items", items)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("AbstractState is immutable")

    @classmethod
    def over(cls, species: Sequence[str], bounds: Mapping[str, Interval]) -> "AbstractState":
        unknown = set(bounds) - set(species)
        if unknown:
            raise ValueError(f"Bounds given for undefined species: {sorted(unknown)}")
        return cls(bounds)

    def __getitem__(self, name: str) -> Interval:
        for key, interval in self._items:
            if key == name:
                return interval
        return ZERO

    def items(self) -> Tuple[Tuple[str, Interval], ...]:
        return self._items

    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self._items)

    def replace(self, name: str, interval: Interval) -> "AbstractState":
        updated = dict(self._items)
        updated[name] = interval
        return AbstractState(updated)

    def is_exact(self) -> bool:
        return all(interval.is_exact for _, interval in self._items)

    def key(self) -> Tuple[Tuple[str, Tuple[int, int, int]], ...]:
        return tuple((name, interval.key()) for name, interval in self._items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AbstractState):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __lt__(self, other: "AbstractState") -> bool:
        return self.key() < other.key()

    def render(self, species: Sequence[str] = ()) -> str:
        names = list(species) or list(self.names())
        return "{" + ",".join(f"{name}:{self[name]}" for name in names) + "}"

    def __repr__(self) -> str:
        return self.render()


def _names(*states: AbstractState) -> List[str]:
    return sorted({name for state in states for name in state.names()})


def state_leq(first: AbstractState, second: AbstractState) -> bool:
    return all(interval_leq(first[name], second[name]) for name in _names(first, second))


def state_join(first: AbstractState, second: AbstractState) -> AbstractState:
    return AbstractState({name: interval_join(first[name], second[name]) for name in _names(first, second)})


def astate_sum(first: AbstractState, second: AbstractState) -> AbstractState:
    return AbstractState({name: interval_add(first[name], second[name]) for name in _names(first, second)})


def astate_diff(first: AbstractState, second: AbstractState) -> AbstractState:
    return AbstractState({name: interval_sub(first[name], second[name]) for name in _names(first, second)})


def alpha_state(marking: Multiset) -> AbstractState:
    return AbstractState({name: Interval.exact(count) for name, count in marking.items()})


def alpha_set(markings: Iterable[Multiset]) -> AbstractState:
    result: Optional[AbstractState] = None
    for marking in markings:
        abstract = alpha_state(marking)
        result = abstract if result is None else state_join(result, abstract)
    if result is None:
        raise ValueError("alpha_set needs at least one multiset")
    return result


def gamma_contains(state: AbstractState, marking: Multiset) -> bool:
    names = set(state.names()) | set(marking)
    return all(state[name].contains(marking[name]) for name in names)


def gamma_count(state: AbstractState) -> Optional[int]:
    """Exact size of the concretization set, None when it is infinite."""
    total = 1
    for _, interval in state.items():
        width = interval.width()
        if width is None:
            return None
        total *= width
    return total


def gamma_enumerate(state: AbstractState, cap: int) -> Iterator[Multiset]:
    """
    Every concretization in lexicographic order of the sorted species encoding.
    Raises EnumerationError before yielding anything when the set is infinite or above `cap`.
    """
    count = gamma_count(state)
    if count is None or count > cap:
        raise EnumerationError(count, cap)
    return _enumerate(state)


def _enumerate(state: AbstractState) -> Iterator[Multiset]:
    names = state.names()
    ranges = [state[name].values() for name in names]
    for combination in itertools.product(*ranges):
        yield Multiset(zip(names, combination))


class Polarity(str, Enum):
    ZERO = "=0"
    POSITIVE = ">0"


@dataclass(frozen=True, order=True)
class SplitTag:
    species: str
    polarity: Polarity

    def __str__(self) -> str:
        return f"({self.species}{self.polarity.value})"


def split_applies(interval: Interval) -> bool:
    """True when the interval has the form [0,n] with n > 0 (finite or not)."""
    return interval.lo == 0 and (interval.hi is None or interval.hi > 0)


def split_state(state: AbstractState, tag: SplitTag) -> AbstractState:
    interval = state[tag.species]
    if not split_applies(interval):
        return state
    if tag.polarity is Polarity.ZERO:
        return state.replace(tag.species, ZERO)
    return state.replace(tag.species, Interval(1, interval.hi))


def split_interval(interval: Interval, tag: SplitTag, consumed: int = 1) -> Interval:
    """
    Clip a source multiplicity interval to the values consistent with the branch `tag`
    of a species that loses `consumed` copies: (X=0) keeps [lo, consumed], (X>0) keeps
    [consumed+1, hi]. Intervals the tag cannot split come back unchanged.
    """
    if interval.lo > consumed:
        return interval
    if tag.polarity is Polarity.ZERO:
        hi = consumed if interval.hi is None else min(interval.hi, consumed)
        return Interval(interval.lo, hi)
    if interval.hi is not None and interval.hi < consumed + 1:
        return interval
    return Interval(consumed + 1, interval.hi)
