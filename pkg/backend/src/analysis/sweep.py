from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

from src.abstraction.alts import AbstractLTS, explore
from src.abstraction.domain import AbstractState, gamma_count, gamma_enumerate
from src.analysis.termination import reach_bounds
from src.cgf.errors import EnumerationError
from src.cgf.multiset import Multiset
from src.cgf.syntax import Environment
from src.imc.translate import to_imc
from src.semantics.dtmc import reach_termination, to_dtmc
from src.semantics.lts import build_lts, concretely_terminated
from src.utils.config import AnalysisConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepMember:
    marking: Multiset
    probability: float
    enclosed: bool


@dataclass
class SweepResult:
    initial: AbstractState
    bounds: Tuple[float, float]
    members: List[SweepMember] = field(default_factory=list)

    @property
    def all_enclosed(self) -> bool:
        return all(member.enclosed for member in self.members)


def sweep_family(env: Environment, initial: AbstractState, config: AnalysisConfig) -> SweepResult:
    """Exact termination probability of every member of the family, checked against the abstract bounds."""
    members = list(gamma_enumerate(initial, config.enum_cap))

    alts = explore(env, initial, widening=config.widening, state_cap=config.state_cap, workers=config.workers)
    imc = to_imc(alts, enum_cap=config.enum_cap, workers=config.workers)
    lo, hi = reach_bounds(imc, epsilon=config.epsilon, max_iters=config.max_iters).at(imc.initial)

    result = SweepResult(initial=initial, bounds=(lo, hi))
    for marking in members:
        lts = build_lts(env, marking, state_cap=config.state_cap, workers=config.workers)
        probability = reach_termination(to_dtmc(lts), epsilon=config.epsilon, max_iters=config.max_iters)[marking]
        enclosed = lo - config.epsilon <= probability <= hi + config.epsilon
        if not enclosed:
            logger.warning("Member %s terminates with %.12g, outside [%.12g, %.12g]", marking, probability, lo, hi)
        result.members.append(SweepMember(marking=marking, probability=probability, enclosed=enclosed))

    logger.info("Swept %d family members, all enclosed: %s", len(result.members), result.all_enclosed)
    return result


def hybrid_states(alts: AbstractLTS, cap: int) -> List[int]:
    """Abstract states whose concretizations mix terminated and live multisets. Unenumerable states are skipped."""
    hybrid: List[int] = []
    for i, state in enumerate(alts.states):
        count = gamma_count(state)
        if count is None or count > cap:
            logger.debug("Skipping hybrid check of %s (%s concretizations)", state, count)
            continue
        try:
            verdicts = {concretely_terminated(alts.env, marking) for marking in gamma_enumerate(state, cap)}
        except EnumerationError:
            continue
        if len(verdicts) > 1:
            hybrid.append(i)
    return hybrid
