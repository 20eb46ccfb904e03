from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple, TypeVar

from src.cgf.errors import ModelError, StateCapExceeded
from src.cgf.multiset import Multiset, mdiff, msum
from src.cgf.syntax import Environment
from src.semantics.reactions import Reaction, ReactionKind, TransLabel, reactions, render_theta

logger = logging.getLogger(__name__)

S = TypeVar("S")
T = TypeVar("T")


@dataclass(frozen=True)
class Transition:
    source: Multiset
    theta: TransLabel
    delta: Tuple[int, ...]
    rate_param: Fraction
    target: Multiset
    kind: ReactionKind

    def __str__(self) -> str:
        return f"{self.source} -{render_theta(self.theta)},{self.delta},{self.rate_param}-> {self.target}"


def rate(transition: Transition) -> Fraction:
    """n*r for delays, n*(m-1)*r for homo-species syncs, n*m*r for hetero syncs."""
    if transition.kind is ReactionKind.DELAY:
        (n,) = transition.delta
        return n * transition.rate_param
    n, m = transition.delta
    if transition.kind is ReactionKind.HOMO:
        return n * max(m - 1, 0) * transition.rate_param
    return n * m * transition.rate_param


def fire(reaction: Reaction, marking: Multiset) -> Transition:
    delta = tuple(marking[species] for species in reaction.participants)
    target = msum(mdiff(marking, reaction.consumed), reaction.produced)
    return Transition(
        source=marking,
        theta=reaction.theta,
        delta=delta,
        rate_param=reaction.rate_param,
        target=target,
        kind=reaction.kind,
    )


def enabled_transitions(env: Environment, marking: Multiset) -> List[Transition]:
    """Every syntactic instance of the Delay and Sync rules, zero-rate ones included."""
    return [fire(reaction, marking) for reaction in reactions(env)]


@dataclass
class LTS:
    env: Environment
    initial: Multiset
    states: List[Multiset] = field(default_factory=list)
    transitions: List[Transition] = field(default_factory=list)
    index: Dict[Multiset, int] = field(default_factory=dict)
    _outgoing: Dict[int, List[Transition]] = field(default_factory=dict, repr=False)

    def add_state(self, marking: Multiset) -> int:
        self.index[marking] = len(self.states)
        self.states.append(marking)
        self._outgoing[self.index[marking]] = []
        return self.index[marking]

    def add_transition(self, transition: Transition) -> None:
        self.transitions.append(transition)
        self._outgoing[self.index[transition.source]].append(transition)

    def outgoing(self, marking: Multiset) -> List[Transition]:
        return self._outgoing[self.index[marking]]

    def ts(self, source: Multiset, target: Multiset) -> List[Transition]:
        return [t for t in self.outgoing(source) if t.target == target]


def rate_sum(lts: LTS, source: Multiset, target: Multiset) -> Fraction:
    return sum((rate(t) for t in lts.ts(source, target)), Fraction(0))


def exit_rate(lts: LTS, source: Multiset) -> Fraction:
    return sum((rate(t) for t in lts.outgoing(source)), Fraction(0))


def expand_frontier(
    frontier: Sequence[S], successors: Callable[[S], T], workers: int
) -> List[T]:
    """Successor lists for a BFS level, in frontier order whatever the worker count."""
    if workers <= 1 or len(frontier) < 2:
        return [successors(state) for state in frontier]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(successors, frontier))


def build_lts(env: Environment, initial: Multiset, state_cap: int = 100_000, workers: int = 1) -> LTS:
    """
    Breadth-first closure from `initial` over positive-rate transitions. New states of one
    source are numbered in lexicographic order of their encoding.
    """

    start = time.perf_counter()
    rules = reactions(env)
    lts = LTS(env=env, initial=initial)
    lts.add_state(initial)

    def successors(marking: Multiset) -> List[Transition]:
        moves = [fire(reaction, marking) for reaction in rules]
        return [move for move in moves if rate(move) > 0]

    frontier = [initial]
    while frontier:
        expanded = expand_frontier(frontier, successors, workers)
        next_frontier: List[Multiset] = []
        for moves in expanded:
            for target in sorted({move.target for move in moves if move.target not in lts.index}):
                if len(lts.states) >= state_cap:
                    logger.error("LTS exploration hit the state cap of %d", state_cap)
                    raise StateCapExceeded(state_cap, lts)
                lts.add_state(target)
                next_frontier.append(target)
            for move in moves:
                lts.add_transition(move)
        frontier = next_frontier

    if not labels_per_state_distinct(lts):
        clash = next(s for s in lts.states if not _labels_distinct(lts.outgoing(s)))
        logger.error("Transitions leaving %s share a label", clash)
        raise ModelError(f"transitions leaving {clash} share a label; the environment is not well-labeled")

    logger.info(
        "Built LTS: %d states, %d transitions in %.3fs",
        len(lts.states),
        len(lts.transitions),
        time.perf_counter() - start,
    )
    return lts


def _labels_distinct(moves: Sequence[Transition]) -> bool:
    return len({t.theta for t in moves}) == len(moves)


def labels_per_state_distinct(lts: LTS) -> bool:
    return all(_labels_distinct(lts.outgoing(s)) for s in lts.states)


def concretely_terminated(env: Environment, marking: Multiset) -> bool:
    """No positive-rate transition leaves the multiset."""
    return all(rate(move) == 0 or move.target == marking for move in enabled_transitions(env, marking))
