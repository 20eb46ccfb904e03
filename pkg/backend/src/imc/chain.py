from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Sequence, Tuple

from src.abstraction.domain import AbstractState, alpha_state
from src.cgf.errors import MalformedImc
from src.semantics.dtmc import DTMC
from src.semantics.reactions import TransLabel

logger = logging.getLogger(__name__)

LabelSet = FrozenSet[TransLabel]


@dataclass
class IMC:
    """
    Interval Markov chain over abstract states. `lower[i]` and `upper[i]` are sparse rows
    of exact bounds; a missing entry is [0,0].
    """

    states: List[AbstractState]
    lower: List[Dict[int, Fraction]]
    upper: List[Dict[int, Fraction]]
    labels: Dict[Tuple[int, int], LabelSet] = field(default_factory=dict)
    initial: int = 0
    approximate: bool = False

    def __post_init__(self) -> None:
        self.index: Dict[AbstractState, int] = {state: i for i, state in enumerate(self.states)}

    def lo(self, i: int, j: int) -> Fraction:
        return self.lower[i].get(j, Fraction(0))

    def hi(self, i: int, j: int) -> Fraction:
        return self.upper[i].get(j, Fraction(0))

    def label_set(self, i: int, j: int) -> LabelSet:
        return self.labels.get((i, j), frozenset())

    def successors(self, i: int) -> List[int]:
        """States reachable with positive upper probability, self included."""
        return sorted(j for j, p in self.upper[i].items() if p > 0)

    def validate(self) -> None:
        for i in range(len(self.states)):
            for j, upper in self.upper[i].items():
                lower = self.lo(i, j)
                if not (0 <= lower <= upper <= 1):
                    raise MalformedImc(f"Bad interval [{lower},{upper}] on {i}->{j}")
            for j in self.lower[i]:
                if j not in self.upper[i]:
                    raise MalformedImc(f"Lower bound without upper bound on {i}->{j}")


def conflict(first: LabelSet, second: LabelSet) -> bool:
    """Two label sets conflict when they are the same singleton."""
    return len(first) == 1 and first == second


def no_conflict_sets(imc: IMC, i: int) -> List[Tuple[int, ...]]:
    """
    Maximal successor sets of `i` without two conflicting members: every state that
    conflicts with no other, plus one representative of each conflict group. Groups are
    ordered by their first member and the choices enumerated lexicographically.
    """

    successors = imc.successors(i)
    groups: Dict[LabelSet, List[int]] = {}
    free: List[int] = []
    for j in successors:
        labels = imc.label_set(i, j)
        if len(labels) == 1:
            groups.setdefault(labels, []).append(j)
        else:
            free.append(j)
    singletons = [members[0] for members in groups.values() if len(members) == 1]
    contested = [members for members in groups.values() if len(members) > 1]
    base = free + singletons
    return [tuple(sorted(base + list(choice))) for choice in itertools.product(*contested)]


def feasible(imc: IMC, i: int, support: Sequence[int]) -> bool:
    """A distribution on `support` fits the bounds: sum of lowers <= 1 <= sum of uppers."""
    low = sum((imc.lo(i, j) for j in support), Fraction(0))
    high = sum((imc.hi(i, j) for j in support), Fraction(0))
    return low <= 1 <= high


def best_abstraction_mc(dtmc: DTMC) -> IMC:
    states = [alpha_state(marking) for marking in dtmc.states]
    lower = [dict(row) for row in dtmc.rows]
    upper = [dict(row) for row in dtmc.rows]
    return IMC(states=states, lower=lower, upper=upper, labels=dict(dtmc.labels), initial=dtmc.initial)
