from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Tuple

from src.cgf.multiset import Multiset
from src.cgf.syntax import ActionKind, Environment

TransLabel = Tuple[str, ...]


class ReactionKind(str, Enum):
    DELAY = "delay"
    HOMO = "homo"
    HETERO = "hetero"


@dataclass(frozen=True)
class Reaction:
    """
    One syntactic reaction of an environment: a delay prefix, or a complementary
    input/output pair on the same channel with the same rate. `theta` and
    `participants` are input-first for syncs.
    """

    theta: TransLabel
    kind: ReactionKind
    participants: Tuple[str, ...]
    rate_param: Fraction
    consumed: Multiset
    produced: Multiset

    @property
    def stutters(self) -> bool:
        """Firing leaves every multiset unchanged."""
        return self.consumed == self.produced

    def consumed_count(self, species: str) -> int:
        return self.consumed[species]


def render_theta(theta: TransLabel) -> str:
    return theta[0] if len(theta) == 1 else "(" + ",".join(theta) + ")"


def reactions(env: Environment) -> List[Reaction]:
    """All reactions in textual order of the delay or input prefix that starts them."""
    found: List[Reaction] = []
    prefixes = list(env.prefixes())
    for species, prefix in prefixes:
        action = prefix.action
        if action.kind is ActionKind.DELAY:
            found.append(
                Reaction(
                    theta=(action.label,),
                    kind=ReactionKind.DELAY,
                    participants=(species,),
                    rate_param=action.rate,
                    consumed=Multiset.of(species),
                    produced=prefix.product,
                )
            )
        elif action.kind is ActionKind.INPUT:
            for partner, co_prefix in prefixes:
                co_action = co_prefix.action
                if co_action.kind is not ActionKind.OUTPUT:
                    continue
                if co_action.channel != action.channel or co_action.rate != action.rate:
                    continue
                found.append(
                    Reaction(
                        theta=(action.label, co_action.label),
                        kind=ReactionKind.HOMO if partner == species else ReactionKind.HETERO,
                        participants=(species, partner),
                        rate_param=action.rate,
                        consumed=Multiset.of(species, partner),
                        produced=prefix.product + co_prefix.product,
                    )
                )
    return found
