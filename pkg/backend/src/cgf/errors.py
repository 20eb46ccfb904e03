from __future__ import annotations

from typing import Any, List, Optional, Sequence


class CgfError(Exception):
    """Base class for every error raised by the analyzer."""


class ModelError(CgfError, ValueError):
    """
    Parse or validation failure. Carries the position of the first problem (when known)
    and every diagnostic collected.
    """

    def __init__(
        self,
        message: str,
        *,
        line: Optional[int] = None,
        column: Optional[int] = None,
        diagnostics: Optional[Sequence[str]] = None,
    ) -> None:
        self.line = line
        self.column = column
        self.diagnostics: List[str] = list(diagnostics) if diagnostics else [message]
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class UnknownSpecies(ModelError):
    """A species name with no definition in the environment."""

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Undefined species: {name}")


class UnknownLabel(CgfError, LookupError):
    pass


class StateCapExceeded(CgfError, RuntimeError):
    """Exploration stopped at the cap; `partial` holds what was built so far."""

    def __init__(self, cap: int, partial: Any = None) -> None:
        self.cap = cap
        self.partial = partial
        super().__init__(f"State cap of {cap} exceeded")


class EnumerationError(CgfError, ValueError):
    """Concretization enumeration refused; `count` is None when the set is infinite."""

    def __init__(self, count: Optional[int], cap: int) -> None:
        self.count = count
        self.cap = cap
        if count is None:
            message = "Cannot enumerate an infinite concretization set"
        else:
            message = f"Concretization set has {count} members, above the cap of {cap}"
        super().__init__(message)


class InfeasibleSet(CgfError, ValueError):
    pass


class MalformedImc(CgfError, AssertionError):
    pass
