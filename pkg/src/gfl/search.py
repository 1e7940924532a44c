"""Finite monochromatic-subspace search, enumerators, and avoidance colorings.

A coloring assigns one of c colors to every rank-k element with support
inside [0, n).  The searcher backtracks over block-increasing candidate
sequences in a fixed canonical order (by max support position, then
lexicographic on entries) and prunes a partial sequence as soon as its
partial span is bichromatic; any witness is re-verified by an independent
pass that shares no pruning code.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .elements import FinElement, format_element, parse_element
from .errors import BudgetExceeded, NotBlockOrdered, ParseError
from .spans import BlockSequence, span_enumerate, validate_block_sequence

BUILTIN_COLORINGS = ("constant", "size-parity", "min-parity", "random")
DEFAULT_BUDGET = 1_000_000


def finite_sums(values: Sequence[int], max_terms: int | None = None) -> list[int]:
    """All nonempty subset sums with at most max_terms terms, sorted, deduplicated."""
    if len(set(values)) != len(values):
        raise ValueError("summands must be distinct")
    max_terms = len(values) if max_terms is None else max_terms
    out = set()
    for r in range(1, min(max_terms, len(values)) + 1):
        for combo in itertools.combinations(values, r):
            out.add(sum(combo))
    return sorted(out)


def finite_unions(sets: Sequence[frozenset[int] | set[int]]) -> list[frozenset[int]]:
    """Unions of all nonempty subsequences of a block-ordered list of sets."""
    sets = [frozenset(s) for s in sets]
    for a, b in zip(sets, sets[1:]):
        if not a or not b or max(a) >= min(b):
            raise NotBlockOrdered(f"sets {sorted(a)} and {sorted(b)} are not block-ordered")
    out = []
    for r in range(1, len(sets) + 1):
        for combo in itertools.combinations(sets, r):
            out.append(frozenset().union(*combo))
    assert len(set(out)) == len(out)
    return out


def domain_elements(k: int, n: int) -> list[FinElement]:
    """All rank-k elements with support inside [0, n), in candidate order:
    max support position first, then lexicographic on entries."""
    out = []
    for size in range(1, n + 1):
        for positions in itertools.combinations(range(n), size):
            for values in itertools.product(range(1, k + 1), repeat=size):
                if max(values) == k:
                    out.append(FinElement(tuple(zip(positions, values)), k))
    out.sort(key=lambda e: (e.max_pos(), e.entries))
    return out


def _stable_hash_color(seed: int, element: FinElement, colors: int) -> int:
    payload = f"{seed}|{format_element(element)}".encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big") % colors


@dataclass(frozen=True)
class ColoringSpec:
    """Total deterministic coloring of the rank-k elements with support in [0, n).

    kind is a builtin name or "table"; builtins: constant (always 0),
    size-parity (|support| mod colors), min-parity (min support mod colors),
    random (seeded stable hash).
    """

    k: int
    n: int
    colors: int
    kind: str = "constant"
    seed: int | None = None
    table: dict[FinElement, int] | None = field(default=None, hash=False)
    provenance: str | None = None

    def __post_init__(self):
        if self.colors < 1:
            raise ValueError(f"need colors >= 1, got {self.colors}")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random coloring requires a seed")
        if self.kind == "table" and self.table is None:
            raise ValueError("table coloring requires a table")
        if self.kind not in BUILTIN_COLORINGS and self.kind != "table":
            raise ValueError(f"unknown coloring kind {self.kind!r}")

    def color_of(self, element: FinElement) -> int:
        if self.kind == "constant":
            return 0
        if self.kind == "size-parity":
            return len(element.entries) % self.colors
        if self.kind == "min-parity":
            return element.min_pos() % self.colors
        if self.kind == "random":
            return _stable_hash_color(self.seed, element, self.colors)
        value = self.table.get(element)
        if value is None:
            raise KeyError(f"coloring table is missing {format_element(element)!r}")
        return value

    def to_json_obj(self) -> dict:
        obj = {
            "k": self.k,
            "n": self.n,
            "colors": self.colors,
            "kind": self.kind,
            "seed": self.seed,
            "provenance": self.provenance,
        }
        if self.table is not None:
            obj["table"] = {
                format_element(e): c for e, c in sorted(self.table.items(), key=lambda t: t[0].entries)
            }
        return obj


def load_coloring_table(path: str | Path, k: int, n: int, colors: int) -> ColoringSpec:
    """Read a '<element-string> <color>' table file into a ColoringSpec."""
    table: dict[FinElement, int] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected '<element> <color>'", position=lineno)
        element = parse_element(parts[0], k)
        try:
            value = int(parts[1])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: bad color {parts[1]!r}", position=lineno) from exc
        if not 0 <= value < colors:
            raise ParseError(f"{path}:{lineno}: color {value} outside [0, {colors})", position=lineno)
        table[element] = value
    return ColoringSpec(k=k, n=n, colors=colors, kind="table", table=table)


def verify_monochromatic(
    seq: BlockSequence, coloring: Callable[[FinElement], int], d: int
) -> bool:
    """Independent witness check: recolor the full depth-d span from scratch."""
    seen = {coloring(e) for e in span_enumerate(seq, d)}
    return len(seen) == 1


def _candidate_successors(
    candidates: Sequence[FinElement], prev: FinElement | None
) -> Iterable[FinElement]:
    for cand in candidates:
        if prev is None or prev.block_less(cand):
            yield cand


def search_subspace(
    coloring: ColoringSpec, d: int, prune: bool = True
) -> BlockSequence | None:
    """First block sequence (canonical candidate order) whose depth-d span is
    monochromatic, or None when no candidate sequence works.

    With prune enabled a partial sequence dies as soon as its partial span is
    bichromatic; pruning never changes the answer because a deeper span
    contains every shallower one.
    """
    if d < 1:
        raise ValueError(f"need depth >= 1, got {d}")
    candidates = domain_elements(coloring.k, coloring.n)

    def extend(prefix: list[FinElement]) -> BlockSequence | None:
        if len(prefix) == d:
            seq = validate_block_sequence(prefix, coloring.k)
            if verify_monochromatic(seq, coloring.color_of, d):
                return seq
            return None
        for cand in _candidate_successors(candidates, prefix[-1] if prefix else None):
            prefix.append(cand)
            if prune and len(prefix) < d:
                seq = BlockSequence(tuple(prefix), coloring.k)
                colors = {coloring.color_of(e) for e in span_enumerate(seq, len(prefix))}
                if len(colors) > 1:
                    prefix.pop()
                    continue
            found = extend(prefix)
            if found is not None:
                return found
            prefix.pop()
        return None

    return extend([])


def _set_to_element(s: frozenset[int], k: int) -> FinElement:
    return FinElement(tuple((p, k) for p in sorted(s)), k)


def hindman_fu_search(
    set_coloring: Callable[[frozenset[int]], int],
    n: int,
    d: int,
    colors: int = 2,
    k: int = 1,
) -> list[frozenset[int]] | None:
    """Finite-unions search: color sets via elements' supports and return the
    witness blocks as sets.

    k=1 is the exact sets-as-elements bijection; k=2 runs the same set
    coloring through rank-2 elements by support (both exposed on purpose).
    """
    if k not in (1, 2):
        raise ValueError(f"set-language search supports k in (1, 2), got {k}")
    table = {
        e: set_coloring(frozenset(e.support())) % colors
        for e in domain_elements(k, n)
    }
    spec = ColoringSpec(k=k, n=n, colors=colors, kind="table", table=table)
    seq = search_subspace(spec, d)
    if seq is None:
        return None
    return [frozenset(b.support()) for b in seq.blocks]


def _sequence_span_indices(
    candidates: Sequence[FinElement], k: int, d: int
) -> list[tuple[int, ...]]:
    """Span member indices for every complete candidate sequence, precomputed
    once so avoidance enumeration can reject colorings by table lookups."""
    index_of = {e: i for i, e in enumerate(candidates)}
    out = []

    def extend(prefix: list[FinElement]):
        if len(prefix) == d:
            seq = validate_block_sequence(prefix, k)
            out.append(tuple(index_of[e] for e in span_enumerate(seq, d)))
            return
        for cand in _candidate_successors(candidates, prefix[-1] if prefix else None):
            prefix.append(cand)
            extend(prefix)
            prefix.pop()

    extend([])
    return out


def find_avoidance_coloring(
    k: int,
    n: int,
    d: int,
    colors: int,
    mode: str = "exhaustive",
    seed: int | None = None,
    tries: int = 1000,
    budget: int = DEFAULT_BUDGET,
) -> ColoringSpec | None:
    """A coloring admitting no monochromatic depth-d subspace, or None.

    Exhaustive mode enumerates every assignment (a None result is a proof at
    these parameters) and is gated by the budget; randomized mode samples
    seeded assignments.  Any hit is confirmed by a full search_subspace run.
    """
    candidates = domain_elements(k, n)
    spans = _sequence_span_indices(candidates, k, d)

    def admits_no_subspace(assignment: Sequence[int]) -> bool:
        return not any(
            len({assignment[i] for i in span}) == 1 for span in spans
        )

    def confirmed(assignment: Sequence[int], provenance: str) -> ColoringSpec:
        spec = ColoringSpec(
            k=k,
            n=n,
            colors=colors,
            kind="table",
            table=dict(zip(candidates, assignment)),
            provenance=provenance,
        )
        assert search_subspace(spec, d) is None
        return spec

    if mode == "exhaustive":
        total = colors ** len(candidates)
        if total > budget:
            raise BudgetExceeded(
                f"{colors}^{len(candidates)} = {total} colorings exceed budget {budget}"
            )
        for assignment in itertools.product(range(colors), repeat=len(candidates)):
            if admits_no_subspace(assignment):
                return confirmed(assignment, "exhaustive")
        return None
    if mode == "randomized":
        if seed is None:
            raise ValueError("randomized mode requires a seed")
        import random

        rng = random.Random(seed)
        for trial in range(tries):
            assignment = [rng.randrange(colors) for _ in candidates]
            if admits_no_subspace(assignment):
                return confirmed(assignment, f"randomized seed={seed} trial={trial}")
        return None
    raise ValueError(f"mode must be 'exhaustive' or 'randomized', got {mode!r}")
