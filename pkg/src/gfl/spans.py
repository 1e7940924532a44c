"""Block sequences and the combinatorial spaces they generate.

A length-d block sequence of rank-k elements generates a span isomorphic to
the rank-k elements with support inside [0, d): the coordinate vector f maps
to the block-ordered sum of tetris^(k - f(n)) images of the blocks.  The
extended span adds all tetris images of the span, excluding the empty
element.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .elements import EMPTY, FinElement, block_sum, format_element, parse_element
from .errors import (
    BadRank,
    DepthTooLarge,
    IndexOutOfRange,
    NotIncreasing,
    ParseError,
    RankMismatch,
)


@dataclass(frozen=True)
class BlockSequence:
    """Strictly block-increasing blocks of one common rank k."""

    blocks: tuple[FinElement, ...]
    k: int

    def __len__(self) -> int:
        return len(self.blocks)

    def to_json_obj(self) -> dict:
        return {"k": self.k, "blocks": [b.to_json_obj() for b in self.blocks]}


def validate_block_sequence(blocks: Sequence[FinElement], k: int | None = None) -> BlockSequence:
    """Check common rank and strict block order; errors carry the offending index.

    Blocks are stored with ambient normalized to k so span elements compare
    canonically.
    """
    blocks = tuple(blocks)
    if not blocks:
        raise RankMismatch("a block sequence needs at least one block", index=None)
    if k is None:
        k = blocks[0].rank
    for n, b in enumerate(blocks):
        if b.rank != k:
            raise RankMismatch(f"block {n} has rank {b.rank}, expected {k}", index=n)
    for n in range(1, len(blocks)):
        if not blocks[n - 1].block_less(blocks[n]):
            raise NotIncreasing(f"blocks {n - 1} and {n} are not block-increasing", index=n)
    return BlockSequence(tuple(FinElement(b.entries, k) for b in blocks), k)


def parse_blocks(text: str, k: int | None = None) -> BlockSequence:
    """Parse semicolon-separated element strings into a validated sequence."""
    parts = [chunk for chunk in text.split(";") if chunk.strip()]
    if not parts:
        raise ParseError("empty block sequence string")
    return validate_block_sequence([parse_element(chunk) for chunk in parts], k)


def format_blocks(seq: BlockSequence) -> str:
    return ";".join(format_element(b) for b in seq.blocks)


def theta(seq: BlockSequence, f: FinElement) -> FinElement:
    """Map a coordinate vector f to its span element.

    Coordinate n with value v contributes tetris^(k - v) of block n; the
    result has rank equal to rank(f).
    """
    if f.rank > seq.k:
        raise BadRank(f"coordinate rank {f.rank} exceeds block rank {seq.k}")
    if f.entries and f.max_pos() >= len(seq.blocks):
        raise IndexOutOfRange(
            f"coordinate position {f.max_pos()} outside [0, {len(seq.blocks)})"
        )
    return block_sum(seq.blocks[n].tetris_power(seq.k - v) for n, v in f.entries)


def coordinate_vectors(k: int, d: int) -> Iterable[FinElement]:
    """All rank-k coordinate vectors with support inside [0, d), f-lexicographic."""
    for vec in itertools.product(range(k + 1), repeat=d):
        if max(vec, default=0) == k:
            yield FinElement.from_pairs(
                [(n, v) for n, v in enumerate(vec) if v > 0], k
            )


def span_enumerate(seq: BlockSequence, d: int) -> list[FinElement]:
    """The full depth-d span, in coordinate-lexicographic order.

    Cardinality is exactly (k+1)^d - k^d; duplicates would contradict
    injectivity, so they are asserted against rather than silently merged.
    """
    if d > len(seq.blocks):
        raise DepthTooLarge(f"depth {d} exceeds {len(seq.blocks)} blocks")
    out = [theta(seq, f) for f in coordinate_vectors(seq.k, d)]
    assert len(set(out)) == len(out), "span elements collided; blocks are not independent"
    return out


def extended_span_enumerate(seq: BlockSequence, d: int) -> list[FinElement]:
    """All tetris images of the depth-d span, deduplicated, empty excluded."""
    base = span_enumerate(seq, d)
    seen: dict[FinElement, None] = {}
    for i in range(seq.k + 1):
        for e in base:
            img = e.tetris_power(i)
            if not img.is_empty:
                seen.setdefault(img, None)
    return list(seen)


def span_contains(seq: BlockSequence, x: FinElement) -> FinElement | None:
    """Invert theta: return the coordinate vector f with theta(f) = x, if any.

    Decoding segments x's support block by block: the restriction of x to a
    block's support region must equal a tetris image of that block, and no
    support may be left over.
    """
    remaining = dict(x.entries)
    coords: list[tuple[int, int]] = []
    for n, b in enumerate(seq.blocks):
        seg = {p: remaining[p] for p, _ in b.entries if p in remaining}
        if not seg:
            continue
        first = min(seg)
        shift = b.value_at(first) - seg[first]
        if shift < 0 or shift > seq.k - 1:
            return None
        expected = {p: v - shift for p, v in b.entries if v > shift}
        if seg != expected:
            return None
        coords.append((n, seq.k - shift))
        for p in seg:
            del remaining[p]
    if remaining:
        return None
    witness = FinElement(tuple(coords), max((v for _, v in coords), default=0))
    assert theta(seq, witness) == x
    return witness
