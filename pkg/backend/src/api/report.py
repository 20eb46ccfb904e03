from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field

from src.abstraction.alts import AbstractLTS
from src.abstraction.domain import AbstractState
from src.analysis.termination import ReachBounds
from src.cgf.multiset import Multiset
from src.imc.chain import IMC
from src.semantics.dtmc import DTMC
from src.semantics.reactions import TransLabel, render_theta
from src.utils.config import AnalysisConfig

Marking = Dict[str, Union[int, List[Union[int, str]]]]


def _exact(value: Union[float, Fraction]) -> Optional[str]:
    if isinstance(value, Fraction):
        return str(value)
    candidate = Fraction(value).limit_denominator(1_000_000)
    return str(candidate) if float(candidate) == value else None


class Probability(BaseModel):
    """A probability as a 17-significant-digit decimal plus its exact rational form when known."""

    model_config = ConfigDict(frozen=True)

    decimal: str
    exact: Optional[str] = None

    @classmethod
    def of(cls, value: Union[float, Fraction]) -> "Probability":
        return cls(decimal=f"{float(value):#.17g}", exact=_exact(value))

    def as_float(self) -> float:
        return float(self.decimal)


class StateEntry(BaseModel):
    id: int
    marking: Marking


class TransitionEntry(BaseModel):
    source: int
    target: int
    labels: List[str]
    probability: Optional[Probability] = None
    lower: Optional[Probability] = None
    upper: Optional[Probability] = None


class TerminationEntry(BaseModel):
    id: int
    probability: Optional[Probability] = None
    lower: Optional[Probability] = None
    upper: Optional[Probability] = None


class TerminationSection(BaseModel):
    per_state: List[TerminationEntry]
    initial: Union[Probability, List[Probability]]
    scheduler: Optional[Dict[str, Dict[str, int]]] = None


class AnalysisReport(BaseModel):
    model: str
    mode: str
    config: Dict[str, Any]
    state_count: int
    states: List[StateEntry]
    transitions: List[TransitionEntry]
    termination: TerminationSection
    approximate: bool = False
    elapsed_seconds: float = Field(default=0.0, exclude=True)

    def initial_bounds(self) -> List[float]:
        initial = self.termination.initial
        if isinstance(initial, Probability):
            return [initial.as_float()]
        return [entry.as_float() for entry in initial]


class ImcDocument(BaseModel):
    """Standalone IMC dump; reading it back with model_validate_json gives an equal document."""

    states: List[StateEntry]
    initial: int
    edges: List[TransitionEntry]
    approximate: bool = False


def concrete_marking(marking: Multiset) -> Marking:
    return marking.as_dict()


def abstract_marking(state: AbstractState) -> Marking:
    return {name: [interval.lo, "inf" if interval.hi is None else interval.hi] for name, interval in state.items()}


def render_labels(labels: Sequence[TransLabel]) -> List[str]:
    return sorted(render_theta(theta) for theta in labels)


def concrete_report(
    name: str,
    dtmc: DTMC,
    values: Dict[Multiset, float],
    config: AnalysisConfig,
    elapsed: float = 0.0,
) -> AnalysisReport:
    transitions = [
        TransitionEntry(
            source=i,
            target=j,
            labels=render_labels(list(dtmc.labels.get((i, j), frozenset()))),
            probability=Probability.of(p),
        )
        for i, row in enumerate(dtmc.rows)
        for j, p in sorted(row.items())
    ]
    per_state = [
        TerminationEntry(id=i, probability=Probability.of(values[marking])) for i, marking in enumerate(dtmc.states)
    ]
    return AnalysisReport(
        model=name,
        mode="concrete",
        config=config.as_dict(),
        state_count=len(dtmc.states),
        states=[StateEntry(id=i, marking=concrete_marking(m)) for i, m in enumerate(dtmc.states)],
        transitions=transitions,
        termination=TerminationSection(
            per_state=per_state,
            initial=Probability.of(values[dtmc.states[dtmc.initial]]),
        ),
        elapsed_seconds=elapsed,
    )


def _imc_edges(imc: IMC) -> List[TransitionEntry]:
    return [
        TransitionEntry(
            source=i,
            target=j,
            labels=render_labels(list(imc.label_set(i, j))),
            lower=Probability.of(imc.lo(i, j)),
            upper=Probability.of(hi),
        )
        for i in range(len(imc.states))
        for j, hi in sorted(imc.upper[i].items())
    ]


def imc_document(imc: IMC) -> ImcDocument:
    return ImcDocument(
        states=[StateEntry(id=i, marking=abstract_marking(s)) for i, s in enumerate(imc.states)],
        initial=imc.initial,
        edges=_imc_edges(imc),
        approximate=imc.approximate,
    )


def abstract_report(
    name: str,
    alts: AbstractLTS,
    imc: IMC,
    bounds: ReachBounds,
    config: AnalysisConfig,
    elapsed: float = 0.0,
) -> AnalysisReport:
    per_state = []
    for i in range(len(imc.states)):
        lo, hi = bounds.at(i)
        per_state.append(TerminationEntry(id=i, lower=Probability.of(lo), upper=Probability.of(hi)))
    lo, hi = bounds.at(imc.initial)
    scheduler = None
    if bounds.scheduler is not None:
        scheduler = {
            direction: {str(state): choice for state, choice in sorted(picks.items())}
            for direction, picks in bounds.scheduler.items()
        }
    return AnalysisReport(
        model=name,
        mode="abstract",
        config=config.as_dict(),
        state_count=len(alts.states),
        states=[StateEntry(id=i, marking=abstract_marking(s)) for i, s in enumerate(imc.states)],
        transitions=_imc_edges(imc),
        termination=TerminationSection(
            per_state=per_state,
            initial=[Probability.of(lo), Probability.of(hi)],
            scheduler=scheduler,
        ),
        approximate=imc.approximate,
        elapsed_seconds=elapsed,
    )


def dump_json(document: BaseModel) -> str:
    return json.dumps(document.model_dump(mode="json"), sort_keys=True, indent=2)
