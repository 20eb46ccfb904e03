from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.cgf.errors import InfeasibleSet, MalformedImc
from src.imc.chain import IMC, feasible, no_conflict_sets

logger = logging.getLogger(__name__)

_TOLERANCE = 1e-12


class Direction(str, Enum):
    MIN = "min"
    MAX = "max"


def forall_terminated(imc: IMC, i: int) -> bool:
    return imc.lo(i, i) == 1


def exists_terminated(imc: IMC, i: int) -> bool:
    return imc.hi(i, i) == 1


def extremal_expectation(
    lower: Mapping[int, float],
    upper: Mapping[int, float],
    values: Sequence[float],
    support: Sequence[int],
    direction: Direction,
) -> float:
    """
    Optimum of sum(rho[s] * values[s]) over distributions on `support` within the bounds.
    Starts from the lower bounds and hands the remaining mass to the best states first.
    """
    low = sum(lower.get(s, 0.0) for s in support)
    high = sum(upper.get(s, 0.0) for s in support)
    if low > 1 + _TOLERANCE or high < 1 - _TOLERANCE:
        raise InfeasibleSet(f"No distribution on {list(support)} fits the bounds (sum lo={low}, sum hi={high})")

    if direction is Direction.MAX:
        order = sorted(support, key=lambda s: (-values[s], s))
    else:
        order = sorted(support, key=lambda s: (values[s], s))
    remaining = 1.0 - low
    total = 0.0
    for s in order:
        base = lower.get(s, 0.0)
        extra = min(max(upper.get(s, 0.0) - base, 0.0), max(remaining, 0.0))
        remaining -= extra
        total += (base + extra) * values[s]
    return total


@dataclass
class ReachBounds:
    states: List
    lower: np.ndarray
    upper: np.ndarray
    iterations: Tuple[int, int] = (0, 0)
    scheduler: Optional[Dict[str, Dict[int, int]]] = field(default=None)

    def at(self, i: int) -> Tuple[float, float]:
        return float(self.lower[i]), float(self.upper[i])


@dataclass
class _Choices:
    lower: Dict[int, float]
    upper: Dict[int, float]
    sets: List[Tuple[int, ...]]


def _choices(imc: IMC) -> List[_Choices]:
    prepared: List[_Choices] = []
    for i in range(len(imc.states)):
        sets = [ns for ns in no_conflict_sets(imc, i) if feasible(imc, i, ns)]
        prepared.append(
            _Choices(
                lower={j: float(p) for j, p in imc.lower[i].items()},
                upper={j: float(p) for j, p in imc.upper[i].items()},
                sets=sets,
            )
        )
    return prepared


def _iterate(
    choices: List[_Choices],
    targets: Sequence[bool],
    direction: Direction,
    epsilon: float,
    max_iters: int,
) -> Tuple[np.ndarray, int, Dict[int, int]]:
    n = len(choices)
    values = np.zeros(n, dtype=np.float64)
    values[np.asarray(targets, dtype=bool)] = 1.0
    sign = 1.0 if direction is Direction.MIN else -1.0
    best: Dict[int, int] = {}

    sweeps = 0
    while sweeps < max_iters:
        sweeps += 1
        updated = values.copy()
        for i, choice in enumerate(choices):
            if targets[i]:
                continue
            outcomes = [
                extremal_expectation(choice.lower, choice.upper, values, ns, direction) for ns in choice.sets
            ]
            chosen = min(range(len(outcomes)), key=lambda k: (sign * outcomes[k], k))
            best[i] = chosen
            updated[i] = outcomes[chosen]
        change = float(np.max(np.abs(updated - values))) if n else 0.0
        values = updated
        if change < epsilon:
            break
    else:
        logger.warning(
            "Value iteration (%s) stopped after %d sweeps without reaching epsilon=%g",
            direction.value,
            sweeps,
            epsilon,
        )
    return np.clip(values, 0.0, 1.0), sweeps, best


def reach_bounds(
    imc: IMC,
    epsilon: float = 1e-9,
    max_iters: int = 1_000_000,
    with_witness: bool = False,
) -> ReachBounds:
    """
    Lower and upper termination probabilities of every IMC state. The lower run targets
    the states that certainly terminate and lets the scheduler minimise; the upper run
    targets the states that possibly terminate and lets it maximise. Both are Jacobi
    value iterations from zero over the feasible no-conflict sets.
    """

    start = time.perf_counter()
    choices = _choices(imc)
    n = len(imc.states)
    forall = [forall_terminated(imc, i) for i in range(n)]
    exists = [exists_terminated(imc, i) for i in range(n)]
    for i, choice in enumerate(choices):
        if not choice.sets and not (forall[i] and exists[i]):
            raise MalformedImc(f"State {imc.states[i]} has no feasible no-conflict set")

    lower, lower_sweeps, lower_pick = _iterate(choices, forall, Direction.MIN, epsilon, max_iters)
    upper, upper_sweeps, upper_pick = _iterate(choices, exists, Direction.MAX, epsilon, max_iters)

    logger.info(
        "Termination bounds over %d abstract states: %d/%d sweeps in %.3fs",
        n,
        lower_sweeps,
        upper_sweeps,
        time.perf_counter() - start,
    )
    scheduler = {"lower": lower_pick, "upper": upper_pick} if with_witness else None
    return ReachBounds(
        states=list(imc.states),
        lower=lower,
        upper=upper,
        iterations=(lower_sweeps, upper_sweeps),
        scheduler=scheduler,
    )
