from __future__ import annotations

import argparse
import json
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from src.abstraction.domain import AbstractState, Interval
from src.cgf.errors import ModelError
from src.cgf.multiset import Multiset
from src.cgf.syntax import ActionKind, BasicAction, Environment, Prefix, SpeciesDef, ensure_well_labeled

logger = logging.getLogger(__name__)

InitialDecl = Union[Multiset, AbstractState]

_TOKEN_SPEC = [
    ("NUMBER", r"\d+(?:\.\d+)?(?:[eE][+-]?\d+)?(?:/\d+)?"),
    ("NAME", r"[A-Za-z][A-Za-z0-9_]*"),
    ("PUNCT", r"[=+.@()?!|:,\[\]]"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+"),
    ("COMMENT", r"#[^\n]*"),
    ("ERROR", r"."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start = 1, 0
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup or "ERROR"
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind in ("SKIP", "COMMENT"):
            continue
        if kind == "ERROR":
            raise ModelError(f"unexpected character {match.group()!r}", line=line, column=column)
        tokens.append(Token(kind, match.group(), line, column))
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


def parse_rate(text: str) -> Fraction:
    """Exact rational from a decimal (`1.5`, `2e-1`) or fraction (`3/2`) literal."""
    numerator, _, denominator = text.partition("/")
    value = Fraction(numerator)
    if denominator:
        if int(denominator) == 0:
            raise ZeroDivisionError(text)
        value /= int(denominator)
    return value


class ModelParser:
    """
    Recursive-descent parser for the model-file grammar. One instance parses one text.
    """

    def __init__(self, text: str) -> None:
        self._tokens = tokenize(text)
        self._pos = 0

    @property
    def _current(self) -> Token:
        return self._tokens[self._pos]

    def _peek(self, offset: int = 1) -> Token:
        index = min(self._pos + offset, len(self._tokens) - 1)
        return self._tokens[index]

    def _advance(self) -> Token:
        token = self._current
        if token.kind != "EOF":
            self._pos += 1
        return token

    def _error(self, message: str, token: Optional[Token] = None) -> ModelError:
        token = token or self._current
        found = token.text or "end of input"
        return ModelError(f"{message}, found {found!r}", line=token.line, column=token.column)

    def _expect(self, text: str) -> Token:
        if self._current.text != text or self._current.kind not in ("PUNCT", "NAME", "NUMBER"):
            raise self._error(f"expected {text!r}")
        return self._advance()

    def _expect_name(self, what: str) -> Token:
        if self._current.kind != "NAME":
            raise self._error(f"expected {what}")
        return self._advance()

    def _expect_int(self, what: str) -> int:
        token = self._current
        if token.kind != "NUMBER" or not token.text.isdigit():
            raise self._error(f"expected {what}")
        self._advance()
        return int(token.text)

    def parse(self) -> Tuple[Environment, InitialDecl]:
        definitions: List[SpeciesDef] = []
        seen_species: Dict[str, Token] = {}
        init: Optional[Tuple[Token, List[Tuple[Token, int, Optional[int], bool]]]] = None

        while self._current.kind != "EOF":
            keyword = self._current
            if keyword.kind == "NAME" and keyword.text == "species":
                self._advance()
                definition = self._parse_species()
                if definition.name in seen_species:
                    first = seen_species[definition.name]
                    raise ModelError(
                        f"duplicate species '{definition.name}' (first defined at line {first.line})",
                        line=definition.line,
                    )
                seen_species[definition.name] = keyword
                definitions.append(definition)
            elif keyword.kind == "NAME" and keyword.text == "init":
                if init is not None:
                    raise self._error("duplicate init declaration", keyword)
                self._advance()
                init = (keyword, self._parse_initlist())
            else:
                raise self._error("expected 'species' or 'init'")

        env = Environment(tuple(definitions))
        if init is None:
            raise ModelError("model declares no init")
        _, entries = init
        ensure_well_labeled(env, tuple(entry[0].text for entry in entries))
        return env, self._build_initial(env, entries)

    def _parse_species(self) -> SpeciesDef:
        name_token = self._expect_name("species name")
        self._expect("=")
        summands: List[Prefix] = []
        if self._current.kind == "NUMBER" and self._current.text == "0":
            self._advance()
            return SpeciesDef(name_token.text, (), line=name_token.line)
        summands.append(self._parse_prefix(name_token.text, 0))
        while self._current.text == "+" and self._current.kind == "PUNCT":
            self._advance()
            summands.append(self._parse_prefix(name_token.text, len(summands)))
        return SpeciesDef(name_token.text, tuple(summands), line=name_token.line)

    def _parse_prefix(self, species: str, index: int) -> Prefix:
        start = self._current
        kind, channel, rate = self._parse_action()
        label = f"{species}#{index}"
        if self._current.text == "@" and self._current.kind == "PUNCT":
            self._advance()
            label = self._expect_name("label after '@'").text
        self._expect(".")
        product = self._parse_product()
        action = BasicAction(kind=kind, channel=channel, rate=rate, label=label)
        return Prefix(action=action, product=product, line=start.line, column=start.column)

    def _parse_action(self) -> Tuple[ActionKind, Optional[str], Fraction]:
        token = self._current
        if token.kind == "NAME" and token.text == "tau" and self._peek().text == "(":
            self._advance()
            return ActionKind.DELAY, None, self._parse_rate_group()
        if token.kind == "PUNCT" and token.text in ("?", "!"):
            self._advance()
            channel = self._expect_name("channel name").text
            kind = ActionKind.INPUT if token.text == "?" else ActionKind.OUTPUT
            return kind, channel, self._parse_rate_group()
        raise self._error("expected an action (tau(r), ?a(r) or !a(r))")

    def _parse_rate_group(self) -> Fraction:
        self._expect("(")
        token = self._current
        if token.kind != "NUMBER":
            raise self._error("expected a rate")
        self._advance()
        try:
            rate = parse_rate(token.text)
        except (ValueError, ZeroDivisionError):
            raise self._error("malformed rate", token) from None
        if rate <= 0:
            raise ModelError(f"rate must be positive, got {token.text}", line=token.line, column=token.column)
        self._expect(")")
        return rate

    def _parse_product(self) -> Multiset:
        if self._current.kind == "NUMBER" and self._current.text == "0":
            self._advance()
            return Multiset()
        names = [self._expect_name("species name or 0").text]
        while self._current.text == "|" and self._current.kind == "PUNCT":
            self._advance()
            names.append(self._expect_name("species name").text)
        return Multiset.of(*names)

    def _parse_initlist(self) -> List[Tuple[Token, int, Optional[int], bool]]:
        entries = [self._parse_init_entry()]
        while self._current.text == "," and self._current.kind == "PUNCT":
            self._advance()
            entries.append(self._parse_init_entry())
        seen = set()
        for token, *_ in entries:
            if token.text in seen:
                raise ModelError(f"species '{token.text}' listed twice in init", line=token.line, column=token.column)
            seen.add(token.text)
        return entries

    def _parse_init_entry(self) -> Tuple[Token, int, Optional[int], bool]:
        name = self._expect_name("species name")
        self._expect(":")
        if self._current.text == "[" and self._current.kind == "PUNCT":
            self._advance()
            lo = self._expect_int("interval lower bound")
            self._expect(",")
            hi: Optional[int]
            if self._current.kind == "NAME" and self._current.text == "inf":
                self._advance()
                hi = None
            else:
                hi = self._expect_int("interval upper bound or 'inf'")
            self._expect("]")
            if hi is not None and hi < lo:
                raise ModelError(f"empty interval [{lo},{hi}] for '{name.text}'", line=name.line, column=name.column)
            return name, lo, hi, True
        count = self._expect_int("multiplicity")
        return name, count, count, False

    def _build_initial(
        self, env: Environment, entries: List[Tuple[Token, int, Optional[int], bool]]
    ) -> InitialDecl:
        if any(is_interval for *_, is_interval in entries):
            bounds = {token.text: Interval(lo, hi) for token, lo, hi, _ in entries}
            return AbstractState.over(env.names(), bounds)
        return Multiset((token.text, lo) for token, lo, _, _ in entries)


def parse_model(text: str) -> Tuple[Environment, InitialDecl]:
    env, init = ModelParser(text).parse()
    logger.debug("Parsed model: %d species, init %s", len(env.species), init)
    return env, init


def load_model(path: Path | str) -> Tuple[Environment, InitialDecl]:
    model_path = Path(path)
    if not model_path.exists():
        raise FileNotFoundError(f"Model file not found: {model_path}")
    return parse_model(model_path.read_text(encoding="utf-8"))


def render_environment(env: Environment) -> str:
    """Model-file text for an environment. Generated labels are left implicit."""
    lines = []
    for definition in env.species:
        if not definition.summands:
            lines.append(f"species {definition.name} = 0")
            continue
        summands = []
        for index, prefix in enumerate(definition.summands):
            product = " | ".join(
                name for name, count in prefix.product.items() for _ in range(count)
            ) or "0"
            label = "" if prefix.label == f"{definition.name}#{index}" else f"@{prefix.label}"
            summands.append(f"{prefix.action.render()}{label}.{product}")
        lines.append(f"species {definition.name} = " + " + ".join(summands))
    return "\n".join(lines)


def main() -> None:
    parser = argparse.ArgumentParser(description="Parse a CGF model and print its structure as JSON.")
    parser.add_argument("model", type=Path, help="Path to a .cgf model file")
    parser.add_argument("--log-level", default="INFO", help="Logging level (default: INFO)")
    args = parser.parse_args()

    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.INFO))
    env, init = load_model(args.model)
    summary = {
        "species": {
            definition.name: [
                {"label": prefix.label, "action": prefix.action.render(), "product": prefix.product.as_dict()}
                for prefix in definition.summands
            ]
            for definition in env.species
        },
        "init": str(init),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
