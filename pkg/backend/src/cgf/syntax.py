from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from src.cgf.errors import ModelError, UnknownLabel, UnknownSpecies
from src.cgf.multiset import Multiset

logger = logging.getLogger(__name__)

__all__ = [
    "ActionKind",
    "BasicAction",
    "Prefix",
    "SpeciesDef",
    "Environment",
    "validate_well_labeled",
    "lookup_action",
    "labels_of",
]


class ActionKind(str, Enum):
    DELAY = "delay"
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class BasicAction:
    kind: ActionKind
    channel: Optional[str]
    rate: Fraction
    label: str

    def __post_init__(self) -> None:
        if self.rate <= 0:
            raise ValueError(f"Rate of action {self.label} must be positive, got {self.rate}")
        if (self.kind is ActionKind.DELAY) != (self.channel is None):
            raise ValueError(f"Action {self.label}: only delays may omit a channel")

    def render(self) -> str:
        if self.kind is ActionKind.DELAY:
            return f"tau({self.rate})"
        sigil = "?" if self.kind is ActionKind.INPUT else "!"
        return f"{sigil}{self.channel}({self.rate})"


@dataclass(frozen=True)
class Prefix:
    """A summand pi@label.Q with Q stored as its solution multiset."""

    action: BasicAction
    product: Multiset
    line: Optional[int] = field(default=None, compare=False)
    column: Optional[int] = field(default=None, compare=False)

    @property
    def label(self) -> str:
        return self.action.label

    def where(self) -> str:
        if self.line is None:
            return "unknown position"
        return f"line {self.line}, column {self.column}"


@dataclass(frozen=True)
class SpeciesDef:
    name: str
    summands: Tuple[Prefix, ...] = ()
    line: Optional[int] = field(default=None, compare=False)


@dataclass(frozen=True)
class Environment:
    """
    Ordered species definitions. Label lookups go through an index built once at
    construction; the index assumes well-labeling, so run validate_well_labeled first
    on environments that were not produced by the parser.
    """

    species: Tuple[SpeciesDef, ...]
    _by_name: Dict[str, SpeciesDef] = field(init=False, repr=False, compare=False)
    _owner: Dict[str, Tuple[str, Prefix]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_name = {definition.name: definition for definition in self.species}
        owner: Dict[str, Tuple[str, Prefix]] = {}
        for definition in self.species:
            for prefix in definition.summands:
                owner.setdefault(prefix.label, (definition.name, prefix))
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "_owner", owner)

    def __hash__(self) -> int:
        return hash(self.species)

    def names(self) -> Tuple[str, ...]:
        return tuple(definition.name for definition in self.species)

    def is_defined(self, name: str) -> bool:
        return name in self._by_name

    def definition(self, name: str) -> SpeciesDef:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownSpecies(name) from None

    def owner_of(self, label: str) -> str:
        try:
            return self._owner[label][0]
        except KeyError:
            raise UnknownLabel(f"Unknown label: {label}") from None

    def prefix_of(self, label: str) -> Prefix:
        try:
            return self._owner[label][1]
        except KeyError:
            raise UnknownLabel(f"Unknown label: {label}") from None

    def prefixes(self) -> Iterator[Tuple[str, Prefix]]:
        """All (species, prefix) pairs in textual order."""
        for definition in self.species:
            for prefix in definition.summands:
                yield definition.name, prefix


def lookup_action(env: Environment, species: str, label: str) -> Prefix:
    for prefix in env.definition(species).summands:
        if prefix.label == label:
            return prefix
    raise UnknownLabel(f"Label {label} does not occur in the definition of {species}")


def labels_of(env: Environment, species: str) -> FrozenSet[str]:
    return frozenset(prefix.label for prefix in env.definition(species).summands)


def validate_well_labeled(env: Environment, initial_names: Tuple[str, ...] = ()) -> List[str]:
    """
    Return diagnostics; an empty list means the environment is well-labeled and closed.
    `initial_names` are the species mentioned by the init declaration.
    """

    diagnostics: List[str] = []

    species_counts = Counter(definition.name for definition in env.species)
    for name, count in species_counts.items():
        if count > 1:
            diagnostics.append(f"species '{name}' defined {count} times")

    seen: Dict[str, List[Prefix]] = {}
    for _, prefix in env.prefixes():
        seen.setdefault(prefix.label, []).append(prefix)
    for label, prefixes in seen.items():
        if len(prefixes) > 1:
            places = " and ".join(prefix.where() for prefix in prefixes)
            diagnostics.append(f"duplicate label '{label}' at {places}")

    defined = set(species_counts)
    for owner, prefix in env.prefixes():
        for name in prefix.product:
            if name not in defined:
                diagnostics.append(
                    f"undefined species '{name}' in the product of '{prefix.label}' ({owner}, {prefix.where()})"
                )
    for name in initial_names:
        if name not in defined:
            diagnostics.append(f"undefined species '{name}' in init")

    for message in diagnostics:
        logger.debug("well-labeling: %s", message)
    return diagnostics


def ensure_well_labeled(env: Environment, initial_names: Tuple[str, ...] = ()) -> None:
    diagnostics = validate_well_labeled(env, initial_names)
    if diagnostics:
        raise ModelError(diagnostics[0], diagnostics=diagnostics)
