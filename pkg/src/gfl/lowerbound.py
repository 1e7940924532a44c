"""Gap counters, the parity coloring, and the end-to-end decoding pipeline.

For an element f and a level i, the value-i positions (n_0, ..., n_l) of f
define consecutive pairs (n_j, n_{j+1}).  A pair is a short gap when the true
level-i set disagrees on [0, n_j] with the stage-n_{j+1} approximation over
the true lower set (needs ground truth); it is a very short gap when two
stage-tuple towers disagree there, the left using the element's own last
value positions as stages and the right replacing one stage by n_{j+1}
(computable without ground truth).  The coloring packs the parities of the
very-short-gap counts per level into one integer.

A suitably spaced block sequence makes every sampled span element free of
both kinds of gap, so its span is monochromatic with color 0 and membership
in every level can be decoded from staged approximations alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .elements import FinElement, block_sum, format_element
from .errors import (
    BadLevel,
    BadRank,
    DomainExceeded,
    EmptyElement,
    InsufficientBlocks,
    InsufficientDomain,
    NotBlockOrdered,
    SearchExhausted,
)
from .oracle import (
    ScriptedFamily,
    limit_eval,
    modulus,
    nested_vector,
    step_approx,
    step_bits,
)
from .spans import BlockSequence, span_enumerate, validate_block_sequence

VSG_VARIANTS = ("outer", "literal")


@dataclass(frozen=True)
class GapReport:
    """Gap census for one element at one level."""

    level: int
    pairs: tuple[tuple[int, int], ...]
    sg_count: int
    vsg_count: int
    short_pairs: tuple[tuple[int, int], ...]
    very_short_pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class HomogeneityReport:
    is_monochromatic: bool
    color: int | None
    sample_size: int
    color_counts: dict[int, int]
    colors_by_element: dict[str, int]

    def to_json_obj(self) -> dict:
        return {
            "is_monochromatic": self.is_monochromatic,
            "color": self.color,
            "sample_size": self.sample_size,
            "color_counts": {str(c): n for c, n in sorted(self.color_counts.items())},
            "colors_by_element": self.colors_by_element,
        }


def _check_gap_input(f: FinElement, family: ScriptedFamily, i: int) -> None:
    if not 1 <= i <= family.k:
        raise BadLevel(f"gap level {i} outside [1, {family.k}]")
    if f.is_empty:
        raise EmptyElement("gap counting needs a nonempty element")
    if f.rank > family.k + 1:
        raise BadRank(f"element rank {f.rank} exceeds k+1 = {family.k + 1}")
    if f.max_pos() >= family.x_max:
        raise DomainExceeded(
            f"support reaches {f.max_pos()}, domain is [0, {family.x_max})"
        )


def short_gap_pairs(
    f: FinElement, family: ScriptedFamily, i: int
) -> list[tuple[int, int]]:
    """Pairs whose stage-n_{j+1} approximation over the true lower set is wrong
    somewhere on [0, n_j].  Uses ground truth; not available to the decoder."""
    _check_gap_input(f, family, i)
    ns = f.positions_of(i)
    truth = family.limit_table[i]
    lower = family.limit_table[i - 1]
    out = []
    for a, b in zip(ns, ns[1:]):
        approx = step_bits(family, i, b, lower, a + 1)
        if any(approx[x] != truth[x] for x in range(a + 1)):
            out.append((a, b))
    return out


def short_gap_count(f: FinElement, family: ScriptedFamily, i: int) -> int:
    return len(short_gap_pairs(f, family, i))


def _mu_stages(f: FinElement, i: int) -> tuple[int, ...]:
    """Last value-t positions for t = i..1, outermost first; 0 when t is absent."""
    last: dict[int, int] = {}
    for p, v in f.entries:
        last[v] = p
    return tuple(last.get(t, 0) for t in range(i, 0, -1))


def very_short_gap_pairs(
    f: FinElement, family: ScriptedFamily, i: int, variant: str = "outer"
) -> list[tuple[int, int]]:
    """Pairs where the two stage-tuple towers disagree on [0, n_j].

    The left tower uses stages (mu_i, ..., mu_1); the right replaces the
    outermost stage by n_{j+1} ("outer", default) or the innermost one
    ("literal").  Computable from the scripted stages alone.
    """
    if variant not in VSG_VARIANTS:
        raise ValueError(f"variant must be one of {VSG_VARIANTS}, got {variant!r}")
    _check_gap_input(f, family, i)
    ns = f.positions_of(i)
    if len(ns) < 2:
        return []
    mus = _mu_stages(f, i)
    lhs = nested_vector(family, i, mus, ns[-2] + 1)
    out = []
    for a, b in zip(ns, ns[1:]):
        stages = (b, *mus[1:]) if variant == "outer" else (*mus[:-1], b)
        rhs = nested_vector(family, i, stages, a + 1)
        if any(lhs[x] != rhs[x] for x in range(a + 1)):
            out.append((a, b))
    return out


def very_short_gap_count(
    f: FinElement, family: ScriptedFamily, i: int, variant: str = "outer"
) -> int:
    return len(very_short_gap_pairs(f, family, i, variant))


def gap_report(
    f: FinElement, family: ScriptedFamily, i: int, variant: str = "outer"
) -> GapReport:
    ns = f.positions_of(i)
    short = tuple(short_gap_pairs(f, family, i))
    very = tuple(very_short_gap_pairs(f, family, i, variant))
    return GapReport(
        level=i,
        pairs=tuple(zip(ns, ns[1:])),
        sg_count=len(short),
        vsg_count=len(very),
        short_pairs=short,
        very_short_pairs=very,
    )


def color(
    f: FinElement, family: ScriptedFamily, k: int | None = None, variant: str = "outer"
) -> int:
    """Pack the per-level very-short-gap parities into one of 2^k colors."""
    k = family.k if k is None else k
    if f.rank != k + 1:
        raise BadRank(f"coloring needs rank {k + 1}, element has rank {f.rank}")
    out = 0
    for i in range(1, k + 1):
        out |= (very_short_gap_count(f, family, i, variant) % 2) << (i - 1)
    return out


def find_moduli(family: ScriptedFamily, m: int, n: int | None = None) -> tuple[int, ...]:
    """Stage tuple (m_n, ..., m_1), outermost first, built outermost-in.

    The tuple satisfies both guarantees: the full tower with exactly these
    stages equals ground truth on [0, m], and each level i is stable over the
    true lower set on [0, m_{i+1}] for every stage > m_i (with m_{n+1} = m).
    The bound for level i-1 is max(m_i, bound_i - 1): the step operator reads
    its lower set on all of [0, x), so the lower level must be correct one
    point shy of the current bound as well as up to the stage above.
    """
    n = family.k if n is None else n
    if not 1 <= n <= family.k:
        raise BadLevel(f"level {n} outside [1, {family.k}]")
    if not 0 <= m < family.x_max:
        raise DomainExceeded(f"prefix bound {m} outside [0, {family.x_max})")
    stages = []
    bound = m
    for i in range(n, 0, -1):
        m_i = modulus(family, i, bound + 1)
        stages.append(m_i)
        bound = max(m_i, bound - 1)
    return tuple(stages)


def required_gap_stage(family: ScriptedFamily, up_to: int) -> int:
    """Least stage past every level's modulus for the prefix [0, up_to]."""
    bound = min(up_to + 1, family.x_max)
    return max(modulus(family, t, bound) for t in range(1, family.k + 1))


def build_companion(
    f: FinElement,
    family: ScriptedFamily,
    fresh_blocks: BlockSequence,
    k: int | None = None,
) -> FinElement:
    """Build g = sum of tetris^i(g_i) from fresh blocks past f, spaced so that
    every short gap of f becomes a very short gap of f + g.

    Each g_i starts past the level-wide modulus for the previous piece's
    prefix (g_0 past the modulus for [0, max_pos(f)]), which yields the
    checked identity vsg_i(f+g) = sg_i(f) + vsg_i(g) for every level.
    """
    k = family.k if k is None else k
    if k != family.k:
        raise BadLevel(f"k={k} does not match the family's {family.k} levels")
    if f.is_empty:
        raise EmptyElement("companion construction needs a nonempty element")
    if fresh_blocks.k != k + 1:
        raise BadRank(f"fresh blocks must have rank {k + 1}, got {fresh_blocks.k}")
    if not f.block_less(fresh_blocks.blocks[0]):
        raise NotBlockOrdered("f must lie entirely below the fresh blocks")
    if fresh_blocks.blocks[-1].max_pos() >= family.x_max:
        raise DomainExceeded("fresh blocks reach past the family domain")

    chosen: list[FinElement] = []
    prev_max = f.max_pos()
    idx = 0
    for _ in range(k + 1):
        need = max(prev_max + 1, required_gap_stage(family, prev_max))
        while idx < len(fresh_blocks.blocks) and fresh_blocks.blocks[idx].min_pos() < need:
            idx += 1
        if idx >= len(fresh_blocks.blocks):
            raise InsufficientBlocks(
                f"no fresh block starts at or past {need}; supply more blocks"
            )
        chosen.append(fresh_blocks.blocks[idx])
        prev_max = fresh_blocks.blocks[idx].max_pos()
        idx += 1

    g = block_sum(piece.tetris_power(i) for i, piece in enumerate(chosen))
    fg = f + g
    for i in range(1, k + 1):
        sg_f = short_gap_pairs(f, family, i)
        vsg_fg = very_short_gap_pairs(fg, family, i)
        vsg_g = very_short_gap_count(g, family, i)
        assert set(sg_f) <= set(vsg_fg), (
            f"level {i}: a short gap of f is not a very short gap of f+g"
        )
        assert len(vsg_fg) == len(sg_f) + vsg_g, (
            f"level {i}: vsg(f+g)={len(vsg_fg)} != sg(f)={len(sg_f)} + vsg(g)={vsg_g}"
        )
    return g


def build_stable_block_sequence(
    family: ScriptedFamily,
    d: int,
    k: int | None = None,
    spacing: int = 1,
    start: int = 0,
) -> BlockSequence:
    """d rank-(k+1) blocks whose spans carry no gaps of either kind.

    Each block holds the full value ladder 1..k+1 (one position per value,
    ascending), so every span element attains every level — required by the
    decoder.  Consecutive blocks are separated past every level's modulus for
    the preceding prefix, which kills all short and very short gaps in the
    sampled spans; within a block each level occurs once, so no pair is ever
    intra-block.
    """
    k = family.k if k is None else k
    if k != family.k:
        raise BadLevel(f"k={k} does not match the family's {family.k} levels")
    if d < 1:
        raise ValueError(f"need d >= 1 blocks, got {d}")
    if spacing < 1:
        raise ValueError(f"spacing must be >= 1, got {spacing}")
    blocks: list[FinElement] = []
    pos = start
    for n in range(d):
        if n > 0:
            prev_max = blocks[-1].max_pos()
            pos = max(prev_max + spacing, required_gap_stage(family, prev_max))
        last = pos + k * spacing
        if last >= family.x_max:
            raise InsufficientDomain(
                f"block {n} would reach position {last}; "
                f"needs x_max >= {last + 1}, have {family.x_max}",
                required_x_max=last + 1,
            )
        blocks.append(
            FinElement(tuple((pos + j * spacing, j + 1) for j in range(k + 1)), k + 1)
        )
    return validate_block_sequence(blocks, k + 1)


def verify_homogeneous(
    seq: BlockSequence,
    family: ScriptedFamily,
    d: int | None = None,
    k: int | None = None,
    variant: str = "outer",
) -> HomogeneityReport:
    """Color every depth-d span element and report whether the color is constant."""
    k = family.k if k is None else k
    if seq.k != k + 1:
        raise BadRank(f"block rank {seq.k} must equal k+1 = {k + 1}")
    d = len(seq.blocks) if d is None else d
    colors_by_element: dict[str, int] = {}
    counts: dict[int, int] = {}
    for e in span_enumerate(seq, d):
        c = color(e, family, k, variant)
        colors_by_element[format_element(e)] = c
        counts[c] = counts.get(c, 0) + 1
    mono = len(counts) == 1
    return HomogeneityReport(
        is_monochromatic=mono,
        color=next(iter(counts)) if mono else None,
        sample_size=len(colors_by_element),
        color_counts=counts,
        colors_by_element=colors_by_element,
    )


def find_decode_pair(
    seq: BlockSequence, family: ScriptedFamily, i: int, x: int
) -> tuple[FinElement, FinElement]:
    """First span pair f < g with x < min_pos(f) and level i in both images.

    f is assembled as f1 + tetris^(k+1-i)(f2) over span elements f1 < f2, so
    its image always attains i; candidates are scanned in span enumeration
    order, making the returned pair deterministic.
    """
    k = family.k
    if not 1 <= i <= k:
        raise BadLevel(f"decode level {i} outside [1, {k}]")
    spans = span_enumerate(seq, len(seq.blocks))
    for f1 in spans:
        if x >= f1.min_pos():
            continue
        for f2 in spans:
            if not f1.block_less(f2):
                continue
            f = f1 + f2.tetris_power(k + 1 - i)
            for g in spans:
                if not f.block_less(g):
                    continue
                if not g.positions_of(i):
                    continue
                return f, g
    raise SearchExhausted(
        f"no span pair decodes level {i} at x={x} with {len(seq.blocks)} blocks; "
        "deepen the block sequence or lower x"
    )


def decode_membership(
    seq: BlockSequence,
    family: ScriptedFamily,
    i: int,
    x: int,
    decoded_lower: Callable[[int], int],
    k: int | None = None,
) -> int:
    """Decide membership of x in level i using staged approximations only.

    `decoded_lower` must answer level i-1 correctly on [0, x) (level 0 is the
    constant-0 predicate).  Ground truth is never consulted; the stage is the
    first value-i position of the found g.
    """
    k = family.k if k is None else k
    if seq.k != k + 1:
        raise BadRank(f"block rank {seq.k} must equal k+1 = {k + 1}")
    if not 0 <= x < family.x_max:
        raise DomainExceeded(f"point {x} outside [0, {family.x_max})")
    f, g = find_decode_pair(seq, family, i, x)
    stage = g.positions_of(i)[0]
    return step_approx(family, i, stage, decoded_lower, x)


@dataclass
class PipelineReport:
    """Everything one end-to-end run produced, JSON-serializable."""

    family_id: str
    k: int
    d: int
    x_bound: int
    vsg_variant: str
    moduli: tuple[int, ...]
    blocks: BlockSequence
    homogeneity: HomogeneityReport
    decoded: list[list[int]] | None
    truth: list[list[int]] | None
    diff: list[tuple[int, int]] | None
    status: str
    detail: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json_obj(self) -> dict:
        return {
            "family_id": self.family_id,
            "k": self.k,
            "d": self.d,
            "x_bound": self.x_bound,
            "vsg_variant": self.vsg_variant,
            "moduli": list(self.moduli),
            "blocks": self.blocks.to_json_obj(),
            "homogeneity": self.homogeneity.to_json_obj(),
            "decoded": self.decoded,
            "truth": self.truth,
            "diff": [list(pair) for pair in self.diff] if self.diff is not None else None,
            "status": self.status,
            "detail": self.detail,
        }


def run_pipeline(
    family: ScriptedFamily,
    d: int,
    x_bound: int,
    k: int | None = None,
    spacing: int = 1,
    start: int | None = None,
    block_sequence: BlockSequence | None = None,
    vsg_variant: str = "outer",
) -> PipelineReport:
    """Build (or accept) a block sequence, verify homogeneity exhaustively at
    depth d, decode every level on [0, x_bound) by induction, and diff the
    result against ground truth.

    Decoding is refused when the span is not monochromatic; a search failure
    is recorded in the report rather than raised.
    """
    k = family.k if k is None else k
    if not 1 <= x_bound <= family.x_max:
        raise DomainExceeded(f"x_bound {x_bound} outside [1, {family.x_max}]")
    if start is None:
        start = x_bound
    seq = block_sequence or build_stable_block_sequence(
        family, d, k, spacing=spacing, start=start
    )
    moduli = find_moduli(family, x_bound - 1, k)
    homogeneity = verify_homogeneous(seq, family, d, k, vsg_variant)

    decoded: list[list[int]] | None = None
    truth: list[list[int]] | None = None
    diff: list[tuple[int, int]] | None = None
    detail = None
    if not homogeneity.is_monochromatic:
        status = "not_monochromatic"
        detail = "span is not monochromatic; decoding refused"
    else:
        rows: list[list[int]] = [[0] * x_bound]
        try:
            for i in range(1, k + 1):
                lower_row = rows[i - 1]
                row = [
                    decode_membership(seq, family, i, x, lower_row.__getitem__, k)
                    for x in range(x_bound)
                ]
                rows.append(row)
        except SearchExhausted as exc:
            status = "search_exhausted"
            detail = str(exc)
        else:
            decoded = rows[1:]
            truth = [
                [limit_eval(family, i, x) for x in range(x_bound)]
                for i in range(1, k + 1)
            ]
            diff = [
                (i, x)
                for i in range(1, k + 1)
                for x in range(x_bound)
                if decoded[i - 1][x] != truth[i - 1][x]
            ]
            status = "ok" if not diff else "diff_nonempty"
    return PipelineReport(
        family_id=family.family_id,
        k=k,
        d=d,
        x_bound=x_bound,
        vsg_variant=vsg_variant,
        moduli=moduli,
        blocks=seq,
        homogeneity=homogeneity,
        decoded=decoded,
        truth=truth,
        diff=diff,
        status=status,
        detail=detail,
    )
