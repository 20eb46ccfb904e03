from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Dict

from src.abstraction.alts import AbstractLTS, explore
from src.abstraction.domain import AbstractState, alpha_state
from src.analysis.termination import ReachBounds, reach_bounds
from src.api.report import AnalysisReport, abstract_report, concrete_report
from src.cgf.errors import ModelError
from src.cgf.multiset import Multiset
from src.cgf.parser import InitialDecl
from src.cgf.syntax import Environment
from src.imc.chain import IMC
from src.imc.translate import to_imc
from src.semantics.dtmc import DTMC, reach_termination, to_dtmc
from src.semantics.lts import LTS, build_lts
from src.utils.config import AnalysisConfig

logger = logging.getLogger(__name__)


@dataclass
class ConcreteRun:
    lts: LTS
    dtmc: DTMC
    values: Dict[Multiset, float]
    report: AnalysisReport


@dataclass
class AbstractRun:
    alts: AbstractLTS
    imc: IMC
    bounds: ReachBounds
    report: AnalysisReport


def as_concrete(initial: InitialDecl) -> Multiset:
    if isinstance(initial, Multiset):
        return initial
    if not initial.is_exact():
        raise ModelError(f"the concrete analysis needs exact counts, init is {initial}")
    return Multiset({name: interval.lo for name, interval in initial.items()})


def as_abstract(initial: InitialDecl) -> AbstractState:
    return alpha_state(initial) if isinstance(initial, Multiset) else initial


def run_check(name: str, env: Environment, initial: InitialDecl, config: AnalysisConfig) -> ConcreteRun:
    start = time.perf_counter()
    marking = as_concrete(initial)
    lts = build_lts(env, marking, state_cap=config.state_cap, workers=config.workers)
    dtmc = to_dtmc(lts)
    values = reach_termination(dtmc, epsilon=config.epsilon, max_iters=config.max_iters)
    elapsed = time.perf_counter() - start
    logger.info("Concrete analysis of %s finished in %.3fs", name, elapsed)
    return ConcreteRun(lts, dtmc, values, concrete_report(name, dtmc, values, config, elapsed))


def run_abstract(name: str, env: Environment, initial: InitialDecl, config: AnalysisConfig) -> AbstractRun:
    start = time.perf_counter()
    state = as_abstract(initial)
    alts = explore(env, state, widening=config.widening, state_cap=config.state_cap, workers=config.workers)
    imc = to_imc(alts, enum_cap=config.enum_cap, workers=config.workers)
    bounds = reach_bounds(imc, epsilon=config.epsilon, max_iters=config.max_iters, with_witness=True)
    elapsed = time.perf_counter() - start
    logger.info("Abstract analysis of %s finished in %.3fs", name, elapsed)
    return AbstractRun(alts, imc, bounds, abstract_report(name, alts, imc, bounds, config, elapsed))
