"""Sparse finite-support sequences over {0,..,k} and their partial algebra.

An element is a finite sorted tuple of (position, value) entries with values
in [1, k]; positions not listed carry value 0.  Rank is the largest value
attained (0 for the empty element) and membership in FIN_j means rank == j
exactly.  Addition is defined only for block-ordered pairs (all of p's
support strictly below all of q's), and the tetris operation decrements
every value, dropping entries that reach 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import BadRank, EmptyElement, NotBlockOrdered, ParseError

_ENTRY_RE = re.compile(r"(\d+):(\d+)")


@dataclass(frozen=True)
class SupportStats:
    """Support extrema: overall and per attained value.

    min_pos/max_pos are None exactly for the empty element; per-value maps
    contain only the values actually attained.
    """

    min_pos: int | None
    max_pos: int | None
    min_by_value: dict[int, int]
    max_by_value: dict[int, int]

    def to_json_obj(self) -> dict:
        return {
            "mu": self.max_pos,
            "lambda": self.min_pos,
            "mu_i": {str(v): p for v, p in sorted(self.max_by_value.items())},
            "lambda_i": {str(v): p for v, p in sorted(self.min_by_value.items())},
        }


@dataclass(frozen=True)
class FinElement:
    """A finite-support map with values bounded by the ambient maximum k."""

    entries: tuple[tuple[int, int], ...] = ()
    k: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"ambient k must be >= 0, got {self.k}")
        prev = -1
        for pos, val in self.entries:
            if pos <= prev:
                raise ValueError(f"positions must be strictly increasing, got {self.entries}")
            if not 1 <= val <= self.k:
                raise ValueError(f"value {val} at position {pos} outside [1, {self.k}]")
            prev = pos

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], k: int | None = None) -> FinElement:
        """Build from unordered (position, value) pairs; ambient defaults to the rank."""
        entries = tuple(sorted(pairs))
        if len({p for p, _ in entries}) != len(entries):
            raise ValueError(f"duplicate positions in {entries}")
        if k is None:
            k = max((v for _, v in entries), default=0)
        return cls(entries, k)

    @classmethod
    def from_dict(cls, mapping: Mapping[int, int], k: int | None = None) -> FinElement:
        return cls.from_pairs(mapping.items(), k)

    @property
    def is_empty(self) -> bool:
        return not self.entries

    @property
    def rank(self) -> int:
        """Largest value attained; 0 for the empty element."""
        return max((v for _, v in self.entries), default=0)

    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    def value_at(self, pos: int) -> int:
        for p, v in self.entries:
            if p == pos:
                return v
        return 0

    def positions_of(self, value: int) -> tuple[int, ...]:
        """Positions where exactly this value is attained, ascending."""
        return tuple(p for p, v in self.entries if v == value)

    def min_pos(self) -> int:
        if self.is_empty:
            raise EmptyElement("empty element has no support")
        return self.entries[0][0]

    def max_pos(self) -> int:
        if self.is_empty:
            raise EmptyElement("empty element has no support")
        return self.entries[-1][0]

    def stats(self) -> SupportStats:
        min_by: dict[int, int] = {}
        max_by: dict[int, int] = {}
        for p, v in self.entries:
            min_by.setdefault(v, p)
            max_by[v] = p
        return SupportStats(
            min_pos=self.entries[0][0] if self.entries else None,
            max_pos=self.entries[-1][0] if self.entries else None,
            min_by_value=min_by,
            max_by_value=max_by,
        )

    def tetris(self) -> FinElement:
        """Decrement every value, dropping entries that hit 0; ambient shrinks too."""
        return FinElement(
            tuple((p, v - 1) for p, v in self.entries if v > 1),
            max(self.k - 1, 0),
        )

    def tetris_power(self, j: int) -> FinElement:
        if j < 0:
            raise ValueError(f"tetris power must be >= 0, got {j}")
        return FinElement(
            tuple((p, v - j) for p, v in self.entries if v > j),
            max(self.k - j, 0),
        )

    def block_less(self, other: FinElement) -> bool:
        """Whether all of self's support lies strictly below all of other's."""
        if self.is_empty or other.is_empty:
            raise EmptyElement("block order is undefined for the empty element")
        return self.entries[-1][0] < other.entries[0][0]

    def __lt__(self, other: FinElement) -> bool:
        return self.block_less(other)

    def add(self, other: FinElement) -> FinElement:
        if not self.block_less(other):
            raise NotBlockOrdered(
                f"cannot add {format_element(self)!r} + {format_element(other)!r}: "
                "supports are not block-ordered"
            )
        return FinElement(self.entries + other.entries, max(self.k, other.k))

    def __add__(self, other: FinElement) -> FinElement:
        return self.add(other)

    def to_json_obj(self) -> dict:
        return {"entries": [[p, v] for p, v in self.entries], "k": self.k}

    @classmethod
    def from_json_obj(cls, obj) -> FinElement:
        if not isinstance(obj, dict) or "entries" not in obj or "k" not in obj:
            raise ParseError(f"element object needs 'entries' and 'k': {obj!r}")
        try:
            return cls.from_pairs([(int(p), int(v)) for p, v in obj["entries"]], int(obj["k"]))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad element object {obj!r}: {exc}") from exc

    def __repr__(self) -> str:
        return f"FinElement({format_element(self)!r}, k={self.k})"


EMPTY = FinElement()


def block_sum(parts: Iterable[FinElement]) -> FinElement:
    """Sum a block-increasing sequence, treating empty elements as identity."""
    total = EMPTY
    for part in parts:
        if part.is_empty:
            continue
        total = part if total.is_empty else total.add(part)
    return total


def embed(p: FinElement, from_l: int, to_k: int) -> FinElement:
    """Raise every support value by to_k - from_l, mapping rank from_l to rank to_k."""
    if from_l < 1 or p.rank != from_l:
        raise BadRank(f"element has rank {p.rank}, expected {from_l}")
    if to_k < from_l:
        raise BadRank(f"target rank {to_k} is below source rank {from_l}")
    delta = to_k - from_l
    return FinElement(tuple((pos, v + delta) for pos, v in p.entries), to_k)


def parse_element(text: str, k: int | None = None) -> FinElement:
    """Parse 'pos:val,pos:val,...'; empty string is the empty element.

    Non-canonical entry order is accepted; output of format_element is always
    canonical (positions ascending).
    """
    text = text.strip()
    if not text:
        return FinElement((), k if k is not None else 0)
    pairs = []
    offset = 0
    for chunk in text.split(","):
        m = _ENTRY_RE.fullmatch(chunk.strip())
        if m is None:
            raise ParseError(f"bad entry {chunk!r} in element string", position=offset)
        pos, val = int(m.group(1)), int(m.group(2))
        if val < 1:
            raise ParseError(f"value must be >= 1 at position {pos}", position=offset)
        pairs.append((pos, val))
        offset += len(chunk) + 1
    try:
        return FinElement.from_pairs(pairs, k)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def format_element(p: FinElement) -> str:
    return ",".join(f"{pos}:{val}" for pos, val in p.entries)
