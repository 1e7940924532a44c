"""Scripted stand-ins for iterated halting-set approximations.

A family scripts k levels over the domain [0, x_max).  Level 0 is the fixed
empty set.  The single-level approximation of a lower set Y at stage s is

    s < sigma_i(x)  ->  s mod 2                      (guaranteed instability)
    s >= sigma_i(x) ->  parity(|Y ∩ [0,x)|) XOR rule_i(x)

so every coordinate provably stabilizes at its scripted stage and each level
depends nontrivially on the one below, while the true limit sets stay
computable.  Stage tuples for nested evaluation are written outermost first;
a tuple shorter than the level fills the missing inner levels with the true
lower set.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

from .errors import BadLevel, DomainExceeded, ParseError, SchemaError

StageTuple = tuple[int, ...]


@dataclass(frozen=True)
class ScriptedFamily:
    """k scripted levels over [0, x_max): per level, a stabilization stage and
    a rule bit for every point."""

    k: int
    x_max: int
    sigma: tuple[tuple[int, ...], ...]
    rule: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"need k >= 1 levels, got {self.k}")
        if self.x_max < 1:
            raise ValueError(f"need x_max >= 1, got {self.x_max}")
        if len(self.sigma) != self.k or len(self.rule) != self.k:
            raise ValueError("sigma/rule must have one row per level")
        for i, (srow, rrow) in enumerate(zip(self.sigma, self.rule), start=1):
            if len(srow) != self.x_max or len(rrow) != self.x_max:
                raise ValueError(f"level {i} rows must have length {self.x_max}")
            if any(s < 0 for s in srow):
                raise ValueError(f"level {i} has a negative stage")
            if any(b not in (0, 1) for b in rrow):
                raise ValueError(f"level {i} has a non-bit rule entry")

    @cached_property
    def limit_table(self) -> tuple[tuple[int, ...], ...]:
        """True sets per level, bottom-up: levels 0..k, each of length x_max."""
        table = [tuple([0] * self.x_max)]
        for i in range(1, self.k + 1):
            lower = table[i - 1]
            row = []
            par = 0
            for x in range(self.x_max):
                row.append(par ^ self.rule[i - 1][x])
                par ^= lower[x]
            table.append(tuple(row))
        return tuple(table)

    @cached_property
    def family_id(self) -> str:
        payload = json.dumps(family_to_json_obj(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _check_level(family: ScriptedFamily, i: int, allow_zero: bool = False) -> None:
    low = 0 if allow_zero else 1
    if not low <= i <= family.k:
        raise BadLevel(f"level {i} outside [{low}, {family.k}]")


def _check_point(family: ScriptedFamily, x: int) -> None:
    if not 0 <= x < family.x_max:
        raise DomainExceeded(f"point {x} outside [0, {family.x_max})")


def step_approx(
    family: ScriptedFamily, i: int, s: int, lower: Callable[[int], int], x: int
) -> int:
    """Stage-s approximation of the level-i set over the bit predicate `lower`.

    Depends on `lower` only through [0, x).
    """
    _check_level(family, i)
    _check_point(family, x)
    if s < family.sigma[i - 1][x]:
        return s % 2
    par = 0
    for y in range(x):
        par ^= 1 & int(lower(y))
    return par ^ family.rule[i - 1][x]


def step_bits(
    family: ScriptedFamily, i: int, s: int, lower_bits: Sequence[int], bound: int
) -> list[int]:
    """Vector form of step_approx on [0, bound) over a lower bit vector."""
    _check_level(family, i)
    if bound > family.x_max:
        raise DomainExceeded(f"bound {bound} exceeds x_max {family.x_max}")
    sigma, rule = family.sigma[i - 1], family.rule[i - 1]
    noise = s % 2
    out = []
    par = 0
    for x in range(bound):
        out.append(noise if s < sigma[x] else par ^ rule[x])
        par ^= lower_bits[x]
    return out


def limit_eval(family: ScriptedFamily, i: int, x: int) -> int:
    """Ground truth: the stable value of level i at x (level 0 is empty)."""
    _check_level(family, i, allow_zero=True)
    _check_point(family, x)
    return family.limit_table[i][x]


def nested_vector(
    family: ScriptedFamily, i: int, stages: Sequence[int], bound: int
) -> list[int]:
    """Evaluate the stage-tuple tower for level i on [0, bound).

    `stages` is outermost first and may be shorter than i; the missing inner
    levels use the true lower sets.  With a full-length tuple no ground truth
    is consulted (the base is the fixed empty level 0).
    """
    _check_level(family, i, allow_zero=True)
    if len(stages) > i:
        raise BadLevel(f"stage tuple of length {len(stages)} for level {i}")
    if bound > family.x_max:
        raise DomainExceeded(f"bound {bound} exceeds x_max {family.x_max}")
    base_level = i - len(stages)
    if base_level == 0:
        bits = [0] * bound
    else:
        bits = list(family.limit_table[base_level][:bound])
    for level in range(base_level + 1, i + 1):
        bits = step_bits(family, level, stages[i - level], bits, bound)
    return bits


def nested_approx(family: ScriptedFamily, i: int, stages: Sequence[int], x: int) -> int:
    """Point evaluation of the stage-tuple tower; empty tuple means ground truth."""
    _check_point(family, x)
    return nested_vector(family, i, stages, x + 1)[x]


def modulus(family: ScriptedFamily, i: int, x_bound: int) -> int:
    """Stage past which level i is stable (over the true lower set) on [0, x_bound).

    Under script semantics this is the max scripted stage on the prefix.
    """
    _check_level(family, i)
    if not 0 <= x_bound <= family.x_max:
        raise DomainExceeded(f"x_bound {x_bound} outside [0, {family.x_max}]")
    return max(family.sigma[i - 1][:x_bound], default=0)


def generate_family(
    seed: int, k: int, x_max: int, sigma_range: tuple[int, int]
) -> ScriptedFamily:
    """Reproducible pseudorandom family; stages uniform in sigma_range inclusive."""
    lo, hi = sigma_range
    if lo < 0 or hi < lo:
        raise ValueError(f"sigma_range {sigma_range} is empty or negative")
    rng = random.Random(seed)
    sigma = tuple(
        tuple(rng.randint(lo, hi) for _ in range(x_max)) for _ in range(k)
    )
    rule = tuple(tuple(rng.randint(0, 1) for _ in range(x_max)) for _ in range(k))
    return ScriptedFamily(k=k, x_max=x_max, sigma=sigma, rule=rule)


def family_to_json_obj(family: ScriptedFamily) -> dict:
    return {
        "k": family.k,
        "x_max": family.x_max,
        "levels": [
            {"sigma": list(family.sigma[i]), "rule": list(family.rule[i])}
            for i in range(family.k)
        ],
    }


def family_from_json_obj(obj) -> ScriptedFamily:
    if not isinstance(obj, dict):
        raise SchemaError(f"family must be an object, got {type(obj).__name__}")
    for key in ("k", "x_max", "levels"):
        if key not in obj:
            raise SchemaError(f"family object missing {key!r}")
    k, x_max, levels = obj["k"], obj["x_max"], obj["levels"]
    if not isinstance(k, int) or not isinstance(x_max, int):
        raise SchemaError("family 'k' and 'x_max' must be integers")
    if not isinstance(levels, list) or len(levels) != k:
        raise SchemaError(f"family needs exactly k={k} level objects")
    sigma, rule = [], []
    for i, level in enumerate(levels, start=1):
        if not isinstance(level, dict) or "sigma" not in level or "rule" not in level:
            raise SchemaError(f"level {i} needs 'sigma' and 'rule' arrays")
        srow, rrow = level["sigma"], level["rule"]
        if not isinstance(srow, list) or not isinstance(rrow, list):
            raise SchemaError(f"level {i} 'sigma'/'rule' must be arrays")
        if len(srow) != x_max or len(rrow) != x_max:
            raise SchemaError(f"level {i} arrays must have length x_max={x_max}")
        if not all(isinstance(v, int) and v >= 0 for v in srow):
            raise SchemaError(f"level {i} 'sigma' must hold naturals")
        if not all(v in (0, 1) for v in rrow):
            raise SchemaError(f"level {i} 'rule' must hold bits")
        sigma.append(tuple(srow))
        rule.append(tuple(rrow))
    try:
        return ScriptedFamily(k=k, x_max=x_max, sigma=tuple(sigma), rule=tuple(rule))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def save_family(family: ScriptedFamily, path: str | Path) -> None:
    Path(path).write_text(json.dumps(family_to_json_obj(family), indent=2) + "\n")


def load_family(path: str | Path) -> ScriptedFamily:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}", position=exc.pos) from exc
    return family_from_json_obj(obj)
