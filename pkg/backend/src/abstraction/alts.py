from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from src.abstraction.domain import (
    AbstractState,
    Interval,
    Polarity,
    SplitTag,
    alpha_state,
    astate_diff,
    astate_sum,
    split_applies,
    split_interval,
    split_state,
    state_leq,
)
from src.cgf.errors import StateCapExceeded
from src.cgf.syntax import Environment
from src.semantics.lts import LTS, expand_frontier
from src.semantics.reactions import Reaction, ReactionKind, TransLabel, reactions, render_theta

logger = logging.getLogger(__name__)

_BRANCHES = (Polarity.ZERO, Polarity.POSITIVE)


@dataclass(frozen=True)
class AbstractTransition:
    source: AbstractState
    theta: TransLabel
    delta: Tuple[Interval, ...]
    rate_param: Fraction
    target: AbstractState
    kind: ReactionKind
    participants: Tuple[str, ...] = field(default=(), compare=False)
    split_tags: FrozenSet[SplitTag] = field(default=frozenset(), compare=False)
    stutters: bool = field(default=False, compare=False)

    def with_target(self, target: AbstractState) -> "AbstractTransition":
        return AbstractTransition(
            source=self.source,
            theta=self.theta,
            delta=self.delta,
            rate_param=self.rate_param,
            target=target,
            kind=self.kind,
            participants=self.participants,
            split_tags=self.split_tags,
            stutters=self.stutters,
        )

    def dedup_key(self) -> Tuple[TransLabel, Tuple[Interval, ...], AbstractState]:
        return (self.theta, self.delta, self.target)

    def render(self) -> str:
        delta = ",".join(str(interval) for interval in self.delta)
        return f"{render_theta(self.theta)} | ({delta}) | {self.rate_param}"


def may_fire(transition: AbstractTransition) -> bool:
    """Upper bound of the transition's rate over its multiplicity intervals is positive."""
    if transition.kind is ReactionKind.HOMO:
        hi = transition.delta[0].hi
        return hi is None or hi >= 2
    return all(interval.hi is None or interval.hi > 0 for interval in transition.delta)


def _apply_reaction(reaction: Reaction, state: AbstractState) -> List[AbstractTransition]:
    pre = astate_sum(astate_diff(state, alpha_state(reaction.consumed)), alpha_state(reaction.produced))
    species = sorted(set(reaction.participants))
    options: List[Sequence[Optional[SplitTag]]] = []
    for name in species:
        if split_applies(pre[name]):
            options.append([SplitTag(name, polarity) for polarity in _BRANCHES])
        else:
            options.append([None])

    produced: List[AbstractTransition] = []
    for choice in itertools.product(*options):
        tags = {tag.species: tag for tag in choice if tag is not None}
        target = pre
        for tag in tags.values():
            target = split_state(target, tag)
        delta = tuple(
            split_interval(state[name], tags[name], reaction.consumed_count(name)) if name in tags else state[name]
            for name in reaction.participants
        )
        produced.append(
            AbstractTransition(
                source=state,
                theta=reaction.theta,
                delta=delta,
                rate_param=reaction.rate_param,
                target=target,
                kind=reaction.kind,
                participants=reaction.participants,
                split_tags=frozenset(tags.values()),
                stutters=reaction.stutters,
            )
        )
    return produced


def _dedup(transitions: Sequence[AbstractTransition]) -> List[AbstractTransition]:
    seen = set()
    unique: List[AbstractTransition] = []
    for transition in transitions:
        key = transition.dedup_key()
        if key in seen:
            continue
        seen.add(key)
        unique.append(transition)
    return unique


def abstract_enabled(env: Environment, state: AbstractState) -> List[AbstractTransition]:
    """
    Instances of the abstract Delay and Sync rules. A consumed species whose recomputed
    interval is [0,n] (n > 0) yields one branch per split tag, with its source interval
    clipped to the values that lead to that branch.
    """
    generated: List[AbstractTransition] = []
    for reaction in reactions(env):
        generated.extend(_apply_reaction(reaction, state))
    return _dedup(generated)


@dataclass
class AbstractLTS:
    env: Environment
    initial: AbstractState
    widened: bool
    states: List[AbstractState] = field(default_factory=list)
    transitions: List[AbstractTransition] = field(default_factory=list)
    index: Dict[AbstractState, int] = field(default_factory=dict)
    replacements: List[Tuple[AbstractState, AbstractState]] = field(default_factory=list)
    _outgoing: Dict[int, List[AbstractTransition]] = field(default_factory=dict, repr=False)

    def add_state(self, state: AbstractState) -> int:
        self.index[state] = len(self.states)
        self.states.append(state)
        self._outgoing[self.index[state]] = []
        return self.index[state]

    def add_transition(self, transition: AbstractTransition) -> None:
        moves = self._outgoing[self.index[transition.source]]
        if any(move.dedup_key() == transition.dedup_key() for move in moves):
            return
        moves.append(transition)
        self.transitions.append(transition)

    def outgoing(self, state: AbstractState) -> List[AbstractTransition]:
        return self._outgoing[self.index[state]]

    def ts(self, source: AbstractState, target: AbstractState) -> List[AbstractTransition]:
        return [move for move in self.outgoing(source) if move.target == target]

    def successors(self, source: AbstractState) -> List[AbstractState]:
        seen: Dict[AbstractState, None] = {}
        for move in self.outgoing(source):
            seen.setdefault(move.target, None)
        return list(seen)


def _dominating(alts: AbstractLTS, state: AbstractState) -> Optional[AbstractState]:
    for candidate in alts.states:
        if state_leq(state, candidate):
            return candidate
    return None


def explore(
    env: Environment,
    initial: AbstractState,
    widening: bool = True,
    state_cap: int = 100_000,
    workers: int = 1,
) -> AbstractLTS:
    """
    Breadth-first closure of the abstract rules. Transitions whose rate bound is 0 are not
    followed. With widening, every computed target is replaced by the first state in
    discovery order that dominates it.
    """

    start = time.perf_counter()
    alts = AbstractLTS(env=env, initial=initial, widened=widening)
    alts.add_state(initial)

    def successors(state: AbstractState) -> List[AbstractTransition]:
        return [move for move in abstract_enabled(env, state) if may_fire(move)]

    frontier = [initial]
    while frontier:
        expanded = expand_frontier(frontier, successors, workers)
        next_frontier: List[AbstractState] = []
        for moves in expanded:
            resolved: Dict[AbstractState, AbstractState] = {}
            for computed in sorted({move.target for move in moves}):
                if widening:
                    replacement = _dominating(alts, computed)
                    if replacement is not None:
                        if replacement != computed:
                            alts.replacements.append((computed, replacement))
                            logger.debug("Widening %s to %s", computed, replacement)
                        resolved[computed] = replacement
                        continue
                elif computed in alts.index:
                    resolved[computed] = computed
                    continue
                if len(alts.states) >= state_cap:
                    logger.error("Abstract exploration hit the state cap of %d", state_cap)
                    raise StateCapExceeded(state_cap, alts)
                alts.add_state(computed)
                next_frontier.append(computed)
                resolved[computed] = computed
            for move in moves:
                alts.add_transition(move.with_target(resolved[move.target]))
        frontier = next_frontier

    logger.info(
        "Explored abstract LTS (widening=%s): %d states, %d transitions in %.3fs",
        widening,
        len(alts.states),
        len(alts.transitions),
        time.perf_counter() - start,
    )
    return alts


def best_abstraction_lts(lts: LTS) -> AbstractLTS:
    alts = AbstractLTS(env=lts.env, initial=alpha_state(lts.initial), widened=False)
    for marking in lts.states:
        alts.add_state(alpha_state(marking))
    for move in lts.transitions:
        alts.add_transition(
            AbstractTransition(
                source=alpha_state(move.source),
                theta=move.theta,
                delta=tuple(Interval.exact(n) for n in move.delta),
                rate_param=move.rate_param,
                target=alpha_state(move.target),
                kind=move.kind,
                participants=tuple(lts.env.owner_of(label) for label in move.theta),
                stutters=move.source == move.target,
            )
        )
    return alts
