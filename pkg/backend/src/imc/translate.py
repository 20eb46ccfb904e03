from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, FrozenSet, List

from src.abstraction.alts import AbstractLTS, AbstractTransition
from src.abstraction.domain import AbstractState
from src.imc.chain import IMC, LabelSet, conflict
from src.imc.symbolic import SymbolicRate, bound_ratio, merged_rates, sym_rate, sym_sum
from src.semantics.lts import expand_frontier

logger = logging.getLogger(__name__)


def label_set(alts: AbstractLTS, source: AbstractState, target: AbstractState) -> LabelSet:
    return frozenset(move.theta for move in alts.ts(source, target))


def ts_minus(alts: AbstractLTS, source: AbstractState, target: AbstractState) -> List[AbstractTransition]:
    """
    Transitions of `source` that may fire alongside the move to `target`: those going
    elsewhere, minus the branches of a conflicting label whose own target conflicts too.
    """
    own = label_set(alts, source, target)
    parallel: List[AbstractTransition] = []
    for move in alts.outgoing(source):
        if move.target == target:
            continue
        single: FrozenSet = frozenset({move.theta})
        if conflict(single, own) and label_set(alts, source, move.target) == single:
            continue
        parallel.append(move)
    return parallel


def hat_rate(alts: AbstractLTS, transition: AbstractTransition, target: AbstractState) -> SymbolicRate:
    """sym_rate, with the part zeroed when its label also fires in parallel elsewhere."""
    rate = sym_rate(transition)
    elsewhere = {move.theta for move in ts_minus(alts, transition.source, target)}
    if transition.theta not in elsewhere:
        return rate
    return SymbolicRate(tuple(replace(part, zeroed=True) for part in rate.parts))


def exit_rate_sym(alts: AbstractLTS, source: AbstractState, target: AbstractState) -> SymbolicRate:
    moves = ts_minus(alts, source, target) + alts.ts(source, target)
    return sym_sum(merged_rates(moves))


def rat_sym(alts: AbstractLTS, source: AbstractState, target: AbstractState) -> SymbolicRate:
    return sym_sum(hat_rate(alts, move, target) for move in alts.ts(source, target))


def _may_terminate(state: AbstractState, moves: List[AbstractTransition]) -> bool:
    """Some concretization of `state` has no positive-rate move that changes it."""
    active = sym_sum(merged_rates([move for move in moves if not move.stutters])).e
    box = {name: state[name] for name in active.variables()}
    return active.evaluate_corner(box, upper=False) == 0


@dataclass
class _Row:
    lower: Dict[AbstractState, Fraction] = field(default_factory=dict)
    upper: Dict[AbstractState, Fraction] = field(default_factory=dict)
    labels: Dict[AbstractState, LabelSet] = field(default_factory=dict)
    approximate: bool = False


def _point(state: AbstractState) -> _Row:
    return _Row(lower={state: Fraction(1)}, upper={state: Fraction(1)})


def _translate_state(alts: AbstractLTS, state: AbstractState, enum_cap: int) -> _Row:
    moves = alts.outgoing(state)
    if not moves:
        return _point(state)

    row = _Row()
    some_exit_vanishes = False
    for target in alts.successors(state):
        exit_rate = exit_rate_sym(alts, state, target)
        box = exit_rate.c
        e_max = exit_rate.e.evaluate_corner(box, upper=True)
        if e_max == 0:
            continue
        if exit_rate.e.evaluate_corner(box, upper=False) == 0:
            some_exit_vanishes = True
        bounds = bound_ratio(rat_sym(alts, state, target), exit_rate, enum_cap)
        row.approximate = row.approximate or not bounds.exhaustive
        if bounds.hi == 0:
            continue
        row.lower[target] = Fraction(0) if bounds.numerator_min == 0 else bounds.lo
        row.upper[target] = bounds.hi
        row.labels[target] = label_set(alts, state, target)

    if not row.upper:
        return _point(state)

    only_stutters = all(move.stutters and move.target == state for move in moves)
    if only_stutters:
        row.lower[state] = row.upper[state] = Fraction(1)
    elif some_exit_vanishes or _may_terminate(state, moves):
        row.lower[state] = Fraction(0)
        row.upper[state] = Fraction(1)
    elif row.lower.get(state) == 1:
        row.lower[state] = Fraction(0)
    return row


def to_imc(alts: AbstractLTS, enum_cap: int = 4096, workers: int = 1) -> IMC:
    """
    Interval Markov chain of an abstract LTS. Each state's row is computed on its own,
    optionally in parallel; assembly follows the abstract state order.
    """

    start = time.perf_counter()
    rows = expand_frontier(alts.states, lambda state: _translate_state(alts, state, enum_cap), workers)

    index = alts.index
    imc = IMC(
        states=list(alts.states),
        lower=[{index[t]: p for t, p in row.lower.items()} for row in rows],
        upper=[{index[t]: p for t, p in row.upper.items()} for row in rows],
        labels={
            (i, index[t]): labels for i, row in enumerate(rows) for t, labels in row.labels.items()
        },
        initial=index[alts.initial],
        approximate=any(row.approximate for row in rows),
    )
    imc.validate()
    if imc.approximate:
        logger.warning("Some IMC bounds used the interval fallback (enum_cap=%d)", enum_cap)
    logger.info("Built IMC over %d abstract states in %.3fs", len(imc.states), time.perf_counter() - start)
    return imc
