"""Finite-memory coercive potentials over a single-letter tail.

A potential of depth k reads only the first k letters of a point.  Values
come from a finite override table on depth-k words; every word off the
table falls back to the tail u(first letter), which decays linearly or
logarithmically and makes the potential coercive.

Two families of oscillation/extremum helpers coexist on purpose.  The
``*_on_letter`` and ``var_j`` forms enumerate admissible words inside a
given finite truncation and are exact there.  The ``*_bound_on_letter``
and ``ambient_*`` forms ignore adjacency and bound the potential over the
full countable alphabet; they are safe (one-sided) for any truncation and
are what the cutoff and barrier-bound formulas consume.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Iterator, Mapping

from .shift_space import FiniteShift, ShiftSpec, Word, is_admissible_word

TAIL_LINEAR = "linear"
TAIL_LOG = "log"


class PotentialError(ValueError):
    """A potential description violates the schema or its invariants."""


@dataclass(frozen=True)
class PotentialSpec:
    depth: int
    tail_kind: str
    tail_scale: float
    table: Mapping[Word, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise PotentialError("depth must be at least 1")
        if self.tail_kind not in (TAIL_LINEAR, TAIL_LOG):
            raise PotentialError(f"unknown tail kind {self.tail_kind!r}")
        if not (self.tail_scale > 0.0) or not math.isfinite(self.tail_scale):
            raise PotentialError("tail scale c must be a positive finite number")
        for word, value in self.table.items():
            if len(word) != self.depth:
                raise PotentialError(
                    f"table word {word} has length {len(word)}, expected depth {self.depth}"
                )
            if any(not isinstance(l, int) or l < 0 for l in word):
                raise PotentialError(f"table word {word} must use nonnegative letters")
            if not math.isfinite(value):
                raise PotentialError(f"table value for {word} must be finite")


def parse_potential(document: str) -> PotentialSpec:
    """Parse the JSON wire format for potentials."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise PotentialError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise PotentialError("potential document must be a JSON object")
    depth = raw.get("depth")
    if not isinstance(depth, int) or isinstance(depth, bool):
        raise PotentialError("depth must be an integer")
    tail = raw.get("tail")
    if not isinstance(tail, dict) or "kind" not in tail or "c" not in tail:
        raise PotentialError('potentials need {"tail": {"kind": ..., "c": ...}}')
    kind = tail["kind"]
    c = tail["c"]
    if not isinstance(c, (int, float)) or isinstance(c, bool):
        raise PotentialError("tail scale c must be a number")
    entries = raw.get("table", [])
    if not isinstance(entries, list):
        raise PotentialError("table must be a list of {word, value} entries")
    table: dict[Word, float] = {}
    for item in entries:
        if not isinstance(item, dict) or "word" not in item or "value" not in item:
            raise PotentialError(f"table entries must be {{word, value}} objects, got {item!r}")
        word_raw = item["word"]
        if not isinstance(word_raw, list) or not all(
            isinstance(l, int) and not isinstance(l, bool) for l in word_raw
        ):
            raise PotentialError(f"table word must be a list of integers, got {word_raw!r}")
        value = item["value"]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise PotentialError(f"table value must be a number, got {value!r}")
        word = tuple(word_raw)
        if word in table:
            raise PotentialError(f"duplicate table word {list(word)}")
        table[word] = float(value)
    return PotentialSpec(depth=depth, tail_kind=str(kind), tail_scale=float(c), table=table)


def validate_table(pot: PotentialSpec, spec: ShiftSpec) -> None:
    """Reject table words that are not admissible in the hosting shift."""
    for word in sorted(pot.table):
        if not is_admissible_word(spec, word):
            raise PotentialError(f"table word {list(word)} is not admissible in the shift")


def tail_value(pot: PotentialSpec, j: int) -> float:
    if j < 0:
        raise PotentialError("letters are nonnegative")
    if pot.tail_kind == TAIL_LINEAR:
        return -pot.tail_scale * j + 0.0
    return -pot.tail_scale * math.log1p(j) + 0.0


def evaluate(pot: PotentialSpec, word: Word) -> float:
    """Potential value on the cylinder of ``word``; reads the first ``depth`` letters."""
    if len(word) < pot.depth:
        raise PotentialError(
            f"word of length {len(word)} is shorter than the memory depth {pot.depth}"
        )
    key = tuple(word[: pot.depth])
    hit = pot.table.get(key)
    if hit is not None:
        return hit
    return tail_value(pot, word[0])


def admissible_words(finite: FiniteShift, length: int) -> Iterator[Word]:
    """All admissible words of the given length, in lexicographic order."""
    if length < 1:
        raise ValueError("word length must be positive")

    def extend(prefix: tuple[int, ...]) -> Iterator[Word]:
        if len(prefix) == length:
            yield prefix
            return
        for nxt in finite.succ[prefix[-1]]:
            yield from extend(prefix + (nxt,))

    for first in finite.letters:
        yield from extend((first,))


# ---------------------------------------------------------------------------
# truncation-exact oscillation and extrema


def var_j(pot: PotentialSpec, finite: FiniteShift, j: int) -> float:
    """Largest |f(w) - f(w')| over admissible depth words sharing j letters."""
    if j < 1:
        raise PotentialError("variation index j must be at least 1")
    if j >= pot.depth:
        return 0.0
    spread = 0.0
    lo: dict[Word, float] = {}
    hi: dict[Word, float] = {}
    for word in admissible_words(finite, pot.depth):
        value = evaluate(pot, word)
        prefix = word[:j]
        if prefix not in lo:
            lo[prefix] = hi[prefix] = value
        else:
            if value < lo[prefix]:
                lo[prefix] = value
            if value > hi[prefix]:
                hi[prefix] = value
    for prefix in lo:
        spread = max(spread, hi[prefix] - lo[prefix])
    return spread


def total_variation(pot: PotentialSpec, finite: FiniteShift) -> float:
    return float(sum(var_j(pot, finite, j) for j in range(1, pot.depth)))


def sup_on_letter(pot: PotentialSpec, finite: FiniteShift, j: int) -> float:
    if j not in finite.pred:
        raise PotentialError(f"letter {j} is not in the truncation")
    best = -math.inf
    for word in admissible_words(finite, pot.depth):
        if word[0] == j:
            best = max(best, evaluate(pot, word))
        elif word[0] > j:
            break
    return best


def inf_on_letter(pot: PotentialSpec, finite: FiniteShift, j: int) -> float:
    if j not in finite.pred:
        raise PotentialError(f"letter {j} is not in the truncation")
    worst = math.inf
    for word in admissible_words(finite, pot.depth):
        if word[0] == j:
            worst = min(worst, evaluate(pot, word))
        elif word[0] > j:
            break
    return worst


# ---------------------------------------------------------------------------
# adjacency-free bounds over the countable alphabet


def sup_bound_on_letter(pot: PotentialSpec, j: int) -> float:
    """Upper bound for f on the cylinder [j], valid in every truncation."""
    best = tail_value(pot, j)
    for word, value in pot.table.items():
        if word[0] == j and value > best:
            best = value
    return best


def inf_bound_on_letter(pot: PotentialSpec, j: int) -> float:
    worst = tail_value(pot, j)
    for word, value in pot.table.items():
        if word[0] == j and value < worst:
            worst = value
    return worst


def ambient_var_j(pot: PotentialSpec, j: int) -> float:
    """Adjacency-free upper bound for Var_j(f).

    Words sharing a first letter but off the table all take the tail value,
    so only table prefixes can open a spread; the tail value joins every
    group because some continuation always escapes the finite table.
    """
    if j < 1:
        raise PotentialError("variation index j must be at least 1")
    if j >= pot.depth:
        return 0.0
    lo: dict[Word, float] = {}
    hi: dict[Word, float] = {}
    for word, value in pot.table.items():
        prefix = word[:j]
        fallback = tail_value(pot, word[0])
        if prefix not in lo:
            lo[prefix] = min(value, fallback)
            hi[prefix] = max(value, fallback)
        else:
            if value < lo[prefix]:
                lo[prefix] = value
            if value > hi[prefix]:
                hi[prefix] = value
    spread = 0.0
    for prefix in lo:
        spread = max(spread, hi[prefix] - lo[prefix])
    return spread


def ambient_total_variation(pot: PotentialSpec) -> float:
    return float(sum(ambient_var_j(pot, j) for j in range(1, pot.depth)))


def coercive_letter_bound(pot: PotentialSpec, threshold: float) -> int:
    """Largest letter whose sup bound still reaches the threshold.

    Every letter j strictly above the returned bound satisfies
    sup f|[j] < threshold.  Log tails can place the bound astronomically
    high, so the tail inversion runs in integer/decimal arithmetic rather
    than floats.
    """
    if not math.isfinite(threshold):
        raise PotentialError("threshold must be finite")
    c = pot.tail_scale
    if pot.tail_kind == TAIL_LINEAR:
        # -c*j >= t  <=>  j <= -t/c
        limit = -threshold / c
        tail_best = math.floor(limit) if limit >= 0 else -1
        # guard against the equality case landing just under an integer
        while tail_value(pot, tail_best + 1) >= threshold:
            tail_best += 1
        while tail_best >= 0 and tail_value(pot, tail_best) < threshold:
            tail_best -= 1
    else:
        # -c*ln(1+j) >= t  <=>  j <= exp(-t/c) - 1
        exponent = -threshold / c
        if exponent < 0:
            tail_best = -1
        else:
            digits = int(exponent / math.log(10.0)) + 25
            with localcontext() as ctx:
                ctx.prec = max(digits, 28)
                bound = Decimal(exponent).exp() - 1
                tail_best = int(bound.to_integral_value(rounding="ROUND_FLOOR"))
            # letters beyond float range cannot be fed back through math.log1p
            if tail_best < 2**52:
                while tail_value(pot, tail_best + 1) >= threshold:
                    tail_best += 1
                while tail_best >= 0 and tail_value(pot, tail_best) < threshold:
                    tail_best -= 1
    best = tail_best
    for word, value in pot.table.items():
        if value >= threshold and word[0] > best:
            best = word[0]
    return max(best, 0)
