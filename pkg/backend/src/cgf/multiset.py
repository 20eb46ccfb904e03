from __future__ import annotations

from typing import Dict, Iterable, Iterator, Mapping, Tuple

__all__ = ["Multiset", "msum", "mdiff"]


class Multiset:
    """
    Immutable map species name -> multiplicity. Zero entries are dropped on construction,
    so equality and hashing are plain map equality.
    """

    __slots__ = ("_items",)

    def __init__(self, counts: Mapping[str, int] | Iterable[Tuple[str, int]] = ()) -> None:
        pairs = counts.items() if isinstance(counts, Mapping) else counts
        merged: Dict[str, int] = {}
        for name, count in pairs:
            if count < 0:
                raise ValueError(f"Negative multiplicity for {name}: {count}")
            merged[name] = merged.get(name, 0) + int(count)
        object.__setattr__(self, "_items", tuple(sorted((n, c) for n, c in merged.items() if c > 0)))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Multiset is immutable")

    @classmethod
    def of(cls, *names: str) -> "Multiset":
        """Multiset with one occurrence per listed name (`of("X", "X")` is {X:2})."""
        return cls((name, 1) for name in names)

    def __getitem__(self, name: str) -> int:
        for key, count in self._items:
            if key == name:
                return count
        return 0

    def __iter__(self) -> Iterator[str]:
        return (name for name, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def items(self) -> Tuple[Tuple[str, int], ...]:
        return self._items

    def size(self) -> int:
        return sum(count for _, count in self._items)

    def as_dict(self) -> Dict[str, int]:
        return dict(self._items)

    def key(self) -> Tuple[Tuple[str, int], ...]:
        """Encoding used for hashing and deterministic ordering."""
        return self._items

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __lt__(self, other: "Multiset") -> bool:
        return self._items < other._items

    def __add__(self, other: "Multiset") -> "Multiset":
        return msum(self, other)

    def __sub__(self, other: "Multiset") -> "Multiset":
        return mdiff(self, other)

    def __repr__(self) -> str:
        body = ", ".join(f"{name}:{count}" for name, count in self._items)
        return "{" + body + "}"


def msum(left: Multiset, right: Multiset) -> Multiset:
    return Multiset(list(left.items()) + list(right.items()))


def mdiff(left: Multiset, right: Multiset) -> Multiset:
    """Pointwise truncated difference: counts never go below zero."""
    return Multiset((name, max(count - right[name], 0)) for name, count in left.items())
