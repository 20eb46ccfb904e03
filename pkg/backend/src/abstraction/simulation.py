from __future__ import annotations

import logging
from typing import Dict, List, Set, Tuple

import networkx as nx

from src.abstraction.alts import AbstractLTS, AbstractTransition
from src.abstraction.domain import interval_leq, state_leq

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


def _delta_leq(first: AbstractTransition, second: AbstractTransition) -> bool:
    return len(first.delta) == len(second.delta) and all(
        interval_leq(a, b) for a, b in zip(first.delta, second.delta)
    )


def _compatible(first: AbstractTransition, second: AbstractTransition) -> bool:
    return first.theta == second.theta and first.rate_param == second.rate_param and _delta_leq(first, second)


def _covers_all(options: Dict[int, List[int]], right_count: int) -> bool:
    """A surjective map left -> right picking from `options` exists."""
    if right_count == 0:
        return not options
    if any(not choices for choices in options.values()):
        return False
    graph = nx.Graph()
    left_nodes = [("l", i) for i in options]
    right_nodes = [("r", j) for j in range(right_count)]
    graph.add_nodes_from(left_nodes, bipartite=0)
    graph.add_nodes_from(right_nodes, bipartite=1)
    graph.add_edges_from((("l", i), ("r", j)) for i, choices in options.items() for j in choices)
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=right_nodes)
    return all(node in matching for node in right_nodes)


def simulation_relation(first: AbstractLTS, second: AbstractLTS, surjective: bool = False) -> Set[Pair]:
    """
    Greatest relation between state indices of `first` and `second` such that related
    states are ordered and every transition on the left is matched on the right by one
    with the same label and rate, a wider multiplicity and a related target. With
    `surjective`, every right transition must also be the image of some left one.
    """

    relation: Set[Pair] = {
        (i, j)
        for i, left in enumerate(first.states)
        for j, right in enumerate(second.states)
        if state_leq(left, right)
    }
    candidates: Dict[Pair, Dict[int, List[Tuple[int, int]]]] = {}
    for i, j in relation:
        left_moves = first.outgoing(first.states[i])
        right_moves = second.outgoing(second.states[j])
        candidates[(i, j)] = {
            a: [
                (b, second.index[r.target])
                for b, r in enumerate(right_moves)
                if _compatible(l, r)
            ]
            for a, l in enumerate(left_moves)
        }

    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        for pair in sorted(relation):
            i, j = pair
            left_moves = first.outgoing(first.states[i])
            options = {
                a: [
                    b
                    for b, target_j in candidates[pair][a]
                    if (first.index[left_moves[a].target], target_j) in relation
                ]
                for a in range(len(left_moves))
            }
            if surjective:
                ok = _covers_all(options, len(second.outgoing(second.states[j])))
            else:
                ok = all(options.values()) if options else True
            if not ok:
                relation.discard(pair)
                changed = True

    logger.debug("Simulation refinement converged after %d rounds with %d pairs", rounds, len(relation))
    return relation


def check_simulation(first: AbstractLTS, second: AbstractLTS, surjective: bool = False) -> bool:
    relation = simulation_relation(first, second, surjective=surjective)
    root = (first.index[first.initial], second.index[second.initial])
    return root in relation
