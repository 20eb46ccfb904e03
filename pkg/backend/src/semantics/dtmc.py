from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Set, Tuple

import networkx as nx
import numpy as np

from src.cgf.multiset import Multiset
from src.semantics.lts import LTS, exit_rate, rate
from src.semantics.reactions import TransLabel

logger = logging.getLogger(__name__)


@dataclass
class DTMC:
    """Rows are sparse: `rows[i]` maps successor index to an exact probability."""

    states: List[Multiset]
    rows: List[Dict[int, Fraction]]
    labels: Dict[Tuple[int, int], FrozenSet[TransLabel]]
    initial: int = 0

    def index_of(self, marking: Multiset) -> int:
        return self.states.index(marking)

    def prob(self, source: Multiset, target: Multiset) -> Fraction:
        return self.rows[self.index_of(source)].get(self.index_of(target), Fraction(0))

    def support_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.states)))
        for i, row in enumerate(self.rows):
            graph.add_edges_from((i, j) for j, p in row.items() if p > 0)
        return graph


def to_dtmc(lts: LTS) -> DTMC:
    rows: List[Dict[int, Fraction]] = []
    labels: Dict[Tuple[int, int], FrozenSet[TransLabel]] = {}
    for i, marking in enumerate(lts.states):
        total = exit_rate(lts, marking)
        if total == 0:
            rows.append({i: Fraction(1)})
            continue
        row: Dict[int, Fraction] = {}
        pair_labels: Dict[int, Set[TransLabel]] = {}
        for move in lts.outgoing(marking):
            move_rate = rate(move)
            if move_rate == 0:
                continue
            j = lts.index[move.target]
            row[j] = row.get(j, Fraction(0)) + move_rate / total
            pair_labels.setdefault(j, set()).add(move.theta)
        rows.append(row)
        for j, thetas in pair_labels.items():
            labels[(i, j)] = frozenset(thetas)
    initial = lts.index[lts.initial]
    return DTMC(states=list(lts.states), rows=rows, labels=labels, initial=initial)


def terminated(dtmc: DTMC, marking: Multiset) -> bool:
    i = dtmc.index_of(marking)
    return _is_terminated(dtmc, i)


def _is_terminated(dtmc: DTMC, i: int) -> bool:
    return all(p == 0 for j, p in dtmc.rows[i].items() if j != i)


def qualitative_sets(dtmc: DTMC, targets: Set[int]) -> Tuple[Set[int], Set[int]]:
    """
    (prob0, prob1) for reaching `targets`: states with no path to a target, and states
    from which no path reaches a prob0 state before a target.
    """
    graph = dtmc.support_graph()
    nodes = set(graph.nodes)
    can_reach: Set[int] = set(targets)
    for target in targets:
        can_reach |= nx.ancestors(graph, target)
    prob0 = nodes - can_reach

    cut = graph.copy()
    cut.remove_edges_from([(i, j) for i in targets for j in list(graph.successors(i))])
    may_fail: Set[int] = set(prob0)
    for state in prob0:
        may_fail |= nx.ancestors(cut, state)
    prob1 = nodes - may_fail
    return prob0, prob1


def reach_termination(dtmc: DTMC, epsilon: float = 1e-9, max_iters: int = 1_000_000) -> Dict[Multiset, float]:
    """
    First-passage probability of the terminated states. Graph precomputation fixes the
    exact 0/1 states; the rest is solved by Gauss-Seidel sweeps in state-index order.
    """

    start = time.perf_counter()
    n = len(dtmc.states)
    targets = {i for i in range(n) if _is_terminated(dtmc, i)}
    prob0, prob1 = qualitative_sets(dtmc, targets)
    unknown = [i for i in range(n) if i not in prob0 and i not in prob1]

    values = np.zeros(n, dtype=np.float64)
    values[list(prob1)] = 1.0
    rows = {i: [(j, float(p)) for j, p in dtmc.rows[i].items()] for i in unknown}

    sweeps = 0
    while unknown and sweeps < max_iters:
        sweeps += 1
        change = 0.0
        for i in unknown:
            updated = sum(p * values[j] for j, p in rows[i])
            change = max(change, abs(updated - values[i]))
            values[i] = updated
        if change < epsilon:
            break
    else:
        if unknown:
            logger.warning("Gauss-Seidel stopped after %d sweeps without reaching epsilon=%g", sweeps, epsilon)

    logger.info(
        "Termination solve: %d states (%d prob0, %d prob1) in %d sweeps, %.3fs",
        n,
        len(prob0),
        len(prob1),
        sweeps,
        time.perf_counter() - start,
    )
    return {marking: float(min(max(values[i], 0.0), 1.0)) for i, marking in enumerate(dtmc.states)}
