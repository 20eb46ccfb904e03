from __future__ import annotations

import logging
from enum import Enum
from typing import List, Optional

from src.abstraction.alts import AbstractLTS
from src.analysis.pipeline import AbstractRun, ConcreteRun
from src.api.report import AnalysisReport, dump_json, imc_document, render_labels
from src.imc.chain import IMC
from src.semantics.dtmc import DTMC
from src.semantics.lts import LTS
from src.semantics.reactions import render_theta

logger = logging.getLogger(__name__)


class Stage(str, Enum):
    LTS = "lts"
    DTMC = "dtmc"
    ALTS = "alts"
    IMC = "imc"
    BOUNDS = "bounds"

    @property
    def concrete(self) -> bool:
        return self in (Stage.LTS, Stage.DTMC)


class OutputFormat(str, Enum):
    JSON = "json"
    DOT = "dot"
    TEXT = "text"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _digraph(name: str, nodes: List[str], edges: List[str]) -> str:
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    lines.extend(f"  {node}" for node in nodes)
    lines.extend(f"  {edge}" for edge in edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def lts_dot(lts: LTS) -> str:
    nodes = [f"s{i} [label={_quote(repr(m))}];" for i, m in enumerate(lts.states)]
    edges = [
        f"s{lts.index[t.source]} -> s{lts.index[t.target]} "
        f"[label={_quote(f'{render_theta(t.theta)}, {t.delta}, {t.rate_param}')}];"
        for t in lts.transitions
    ]
    return _digraph("LTS", nodes, edges)


def dtmc_dot(dtmc: DTMC) -> str:
    nodes = [f"s{i} [label={_quote(repr(m))}];" for i, m in enumerate(dtmc.states)]
    edges = []
    for i, row in enumerate(dtmc.rows):
        for j, p in sorted(row.items()):
            labels = ",".join(render_labels(list(dtmc.labels.get((i, j), frozenset()))))
            edges.append(f"s{i} -> s{j} [label={_quote(f'{labels} | {p}')}];")
    return _digraph("DTMC", nodes, edges)


def alts_dot(alts: AbstractLTS) -> str:
    species = alts.env.names()
    nodes = [f"a{i} [label={_quote(s.render(species))}];" for i, s in enumerate(alts.states)]
    edges = [
        f"a{alts.index[t.source]} -> a{alts.index[t.target]} [label={_quote(t.render())}];"
        for t in alts.transitions
    ]
    return _digraph("AbstractLTS", nodes, edges)


def imc_dot(imc: IMC, species: List[str], annotations: Optional[List[str]] = None) -> str:
    nodes = []
    for i, state in enumerate(imc.states):
        text = state.render(species)
        if annotations is not None:
            text += "\\n" + annotations[i]
        nodes.append(f"a{i} [label={_quote(text)}];")
    edges = []
    for i in range(len(imc.states)):
        for j, hi in sorted(imc.upper[i].items()):
            labels = ",".join(render_labels(list(imc.label_set(i, j))))
            edges.append(f"a{i} -> a{j} [label={_quote(f'{labels} | [{imc.lo(i, j)},{hi}]')}];")
    return _digraph("IMC", nodes, edges)


def report_text(report: AnalysisReport) -> str:
    lines = [f"model: {report.model}", f"mode: {report.mode}", f"states: {report.state_count}"]
    if report.mode == "concrete":
        lines.append(f"termination at init: {report.termination.initial.decimal}")  # type: ignore[union-attr]
        for entry, state in zip(report.termination.per_state, report.states):
            lines.append(f"  {entry.id:>4}  {state.marking}  {entry.probability.decimal}")  # type: ignore[union-attr]
    else:
        lo, hi = report.termination.initial  # type: ignore[misc]
        lines.append(f"termination bounds at init: [{lo.decimal}, {hi.decimal}]")
        if report.approximate:
            lines.append("note: some bounds used the interval fallback")
        for entry, state in zip(report.termination.per_state, report.states):
            lines.append(f"  {entry.id:>4}  {state.marking}  [{entry.lower.decimal}, {entry.upper.decimal}]")  # type: ignore[union-attr]
    lines.append(f"elapsed: {report.elapsed_seconds:.3f}s")
    return "\n".join(lines) + "\n"


def render_concrete(run: ConcreteRun, stage: Stage, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return dump_json(run.report) + "\n"
    if fmt is OutputFormat.TEXT:
        return report_text(run.report)
    return lts_dot(run.lts) if stage is Stage.LTS else dtmc_dot(run.dtmc)


def render_abstract(run: AbstractRun, stage: Stage, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        document = imc_document(run.imc) if stage is Stage.IMC else run.report
        return dump_json(document) + "\n"
    if fmt is OutputFormat.TEXT:
        return report_text(run.report)
    species = list(run.alts.env.names())
    if stage is Stage.ALTS:
        return alts_dot(run.alts)
    if stage is Stage.IMC:
        return imc_dot(run.imc, species)
    annotations = ["[{:.6g},{:.6g}]".format(*run.bounds.at(i)) for i in range(len(run.imc.states))]
    return imc_dot(run.imc, species, annotations)
