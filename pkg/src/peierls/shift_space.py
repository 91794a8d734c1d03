"""Transition structures for one-sided Markov shifts on countable alphabets.

Letters are nonnegative integers and words are plain tuples of letters.
A shift is described by one of four transition rules:

* ``explicit-finite`` -- a finite alphabet with an explicit edge list;
* ``full``            -- every pair of letters admissible;
* ``renewal``         -- letter 0 loops, every letter steps down by one,
                         and 0 additionally jumps up to the arithmetic
                         entry letters ``a*n + b`` for n >= 1;
* ``oracle``          -- an arbitrary membership predicate, library-only.

Finite truncations keep the letters up to a bound and prune the letters
stranded by the cut.  The metric parameter ``lambda`` is carried for
reporting; oscillation bookkeeping downstream is indexed by agreement
length, which orders cylinders the same way for every lambda in (0, 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .digraph import layered_bfs_parents, strongly_connected_components

Letter = int
Word = tuple[int, ...]

KIND_EXPLICIT = "explicit-finite"
KIND_FULL = "full"
KIND_RENEWAL = "renewal"
KIND_ORACLE = "oracle"

SATISFIED = "SATISFIED"
REFUTED = "REFUTED"
UNDECIDED = "UNDECIDED"

# Cap on the number of refutation witnesses carried in a verdict.
MAX_WITNESSES = 24


class ShiftSpecError(ValueError):
    """A shift description violates the schema or its invariants."""


class TruncationError(ValueError):
    """A truncation request produced no usable letters."""


class TransitivityError(ValueError):
    """Required letters do not sit in a single strongly connected piece."""

    def __init__(self, message: str, components: tuple[tuple[int, ...], ...] = ()):
        super().__init__(message)
        self.components = components


@dataclass(frozen=True)
class ShiftSpec:
    """Immutable description of a (possibly countable) Markov shift."""

    kind: str
    alphabet_size: int | None = None
    edges: frozenset[tuple[int, int]] | None = None
    renewal_rule: tuple[int, int] | None = None
    membership: Callable[[int, int], bool] | None = None
    metric_base: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in (KIND_EXPLICIT, KIND_FULL, KIND_RENEWAL, KIND_ORACLE):
            raise ShiftSpecError(f"unknown shift kind {self.kind!r}")
        if not (0.0 < self.metric_base < 1.0):
            raise ShiftSpecError("metric parameter lambda must lie strictly in (0, 1)")
        if self.kind in (KIND_EXPLICIT, KIND_FULL):
            if self.alphabet_size is None or self.alphabet_size < 1:
                raise ShiftSpecError("finite kinds need a positive alphabet_size")
        if self.kind == KIND_EXPLICIT:
            if not self.edges:
                raise ShiftSpecError("explicit-finite shifts need a nonempty edge list")
            n = self.alphabet_size
            for i, j in self.edges:
                if not (0 <= i < n and 0 <= j < n):
                    raise ShiftSpecError(f"edge ({i}, {j}) uses a letter outside 0..{n - 1}")
            outs = {i for i, _ in self.edges}
            ins = {j for _, j in self.edges}
            stranded = sorted(set(range(n)) - (outs & ins))
            if stranded:
                raise ShiftSpecError(f"stranded letters with no loop through them: {stranded}")
        if self.kind == KIND_RENEWAL:
            if self.renewal_rule is None:
                raise ShiftSpecError("renewal shifts need an entry rule (a, b)")
            a, b = self.renewal_rule
            if a < 1 or b < 0:
                raise ShiftSpecError(
                    "entry rule must have a >= 1 and b >= 0 so entries strictly increase"
                )
        if self.kind == KIND_ORACLE and self.membership is None:
            raise ShiftSpecError("oracle shifts need a membership predicate")

    def max_letter(self) -> int | None:
        """Largest letter for the finite kinds, None for countable alphabets."""
        if self.kind in (KIND_EXPLICIT, KIND_FULL):
            return self.alphabet_size - 1  # type: ignore[operator]
        return None


def parse_shift_spec(document: str) -> ShiftSpec:
    """Parse the JSON wire format for shifts.

    The oracle kind has no serial form (the predicate is a Python callable)
    and is rejected here; construct ``ShiftSpec`` directly for that case.
    """
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ShiftSpecError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ShiftSpecError("shift document must be a JSON object")
    kind = raw.get("kind")
    if kind == KIND_ORACLE:
        raise ShiftSpecError("oracle shifts are library-only and have no JSON form")
    if kind not in (KIND_EXPLICIT, KIND_FULL, KIND_RENEWAL):
        raise ShiftSpecError(f"unknown shift kind {kind!r}")
    lam = raw.get("lambda", 0.5)
    if not isinstance(lam, (int, float)) or isinstance(lam, bool):
        raise ShiftSpecError("lambda must be a number in (0, 1)")

    if kind == KIND_RENEWAL:
        rule = raw.get("renewal")
        if not isinstance(rule, dict) or "a" not in rule or "b" not in rule:
            raise ShiftSpecError('renewal shifts need {"renewal": {"a": int, "b": int}}')
        a, b = rule["a"], rule["b"]
        if not isinstance(a, int) or not isinstance(b, int) or isinstance(a, bool) or isinstance(b, bool):
            raise ShiftSpecError("renewal parameters a, b must be integers")
        return ShiftSpec(kind=kind, renewal_rule=(a, b), metric_base=float(lam))

    size = raw.get("alphabet_size")
    if not isinstance(size, int) or isinstance(size, bool) or size < 1:
        raise ShiftSpecError("alphabet_size must be a positive integer")
    if kind == KIND_FULL:
        return ShiftSpec(kind=kind, alphabet_size=size, metric_base=float(lam))

    edges_raw = raw.get("edges")
    if not isinstance(edges_raw, list) or not edges_raw:
        raise ShiftSpecError("explicit-finite shifts need a nonempty edges list")
    edges: set[tuple[int, int]] = set()
    for item in edges_raw:
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in item)
        ):
            raise ShiftSpecError(f"edge entries must be [i, j] integer pairs, got {item!r}")
        edges.add((item[0], item[1]))
    return ShiftSpec(
        kind=kind, alphabet_size=size, edges=frozenset(edges), metric_base=float(lam)
    )


def renewal_is_entry(spec: ShiftSpec, j: int) -> bool:
    """Whether 0 -> j is granted by the arithmetic entry rule."""
    a, b = spec.renewal_rule  # type: ignore[misc]
    return j >= a + b and (j - b) % a == 0


def admissible(spec: ShiftSpec, i: int, j: int) -> bool:
    """Total two-letter admissibility predicate; letters off the alphabet give False."""
    if i < 0 or j < 0:
        return False
    if spec.kind == KIND_FULL:
        return i < spec.alphabet_size and j < spec.alphabet_size  # type: ignore[operator]
    if spec.kind == KIND_EXPLICIT:
        return (i, j) in spec.edges  # type: ignore[operator]
    if spec.kind == KIND_RENEWAL:
        if i == 0 and j == 0:
            return True
        if i == j + 1:
            return True
        return i == 0 and renewal_is_entry(spec, j)
    return bool(spec.membership(i, j))  # type: ignore[misc]


def is_admissible_word(spec: ShiftSpec, word: Word) -> bool:
    if not word:
        return False
    maxl = spec.max_letter()
    if any(l < 0 for l in word):
        return False
    if maxl is not None and any(l > maxl for l in word):
        return False
    return all(admissible(spec, word[t], word[t + 1]) for t in range(len(word) - 1))


# ---------------------------------------------------------------------------
# finite truncations


@dataclass(frozen=True, eq=False)
class FiniteShift:
    """A finite letter set with the induced transition structure.

    ``transitive`` is only set by ``transitive_core``; plain truncations
    leave it False even when they happen to be strongly connected.
    """

    letters: tuple[int, ...]
    succ: Mapping[int, tuple[int, ...]]
    pred: Mapping[int, tuple[int, ...]]
    spec: ShiftSpec | None = None
    truncation_bound: int | None = None
    transitive: bool = False
    _succ_sets: Mapping[int, frozenset[int]] = field(repr=False, default_factory=dict)

    def has_edge(self, i: int, j: int) -> bool:
        s = self._succ_sets.get(i)
        return s is not None and j in s

    def edge_count(self) -> int:
        return sum(len(v) for v in self.succ.values())


def _make_finite(
    spec: ShiftSpec | None,
    bound: int | None,
    letters: Iterable[int],
    succ: Mapping[int, Iterable[int]],
    transitive: bool,
) -> FiniteShift:
    letters_t = tuple(sorted(letters))
    keep = set(letters_t)
    succ_t = {i: tuple(sorted(j for j in succ.get(i, ()) if j in keep)) for i in letters_t}
    pred_map: dict[int, list[int]] = {i: [] for i in letters_t}
    for i in letters_t:
        for j in succ_t[i]:
            pred_map[j].append(i)
    pred_t = {j: tuple(sorted(v)) for j, v in pred_map.items()}
    sets = {i: frozenset(succ_t[i]) for i in letters_t}
    return FiniteShift(
        letters=letters_t,
        succ=succ_t,
        pred=pred_t,
        spec=spec,
        truncation_bound=bound,
        transitive=transitive,
        _succ_sets=sets,
    )


def _raw_truncation_edges(spec: ShiftSpec, letters: list[int]) -> dict[int, list[int]]:
    if spec.kind == KIND_RENEWAL:
        top = letters[-1] if letters else -1
        succ: dict[int, list[int]] = {}
        for j in letters:
            succ[j] = [j - 1] if j >= 1 else []
        if 0 in succ:
            entries = [j for j in letters if j == 0 or renewal_is_entry(spec, j)]
            succ[0] = sorted(set(entries))
        return succ
    # explicit, full and oracle kinds go through the pair predicate
    return {i: [j for j in letters if admissible(spec, i, j)] for i in letters}


def truncate(spec: ShiftSpec, max_letter: int) -> FiniteShift:
    """Induced structure on letters 0..max_letter, stranded letters pruned.

    Pruning iterates: a letter with no in-edge or no out-edge inside the
    retained set can never occur in a point of the truncated shift, and
    removing it may strand further letters.
    """
    if max_letter < 0:
        raise TruncationError("max_letter must be nonnegative")
    top = max_letter
    cap = spec.max_letter()
    if cap is not None:
        top = min(top, cap)
    letters = list(range(top + 1))
    succ = _raw_truncation_edges(spec, letters)

    alive = set(letters)
    changed = True
    while changed:
        changed = False
        indeg = {j: 0 for j in alive}
        outdeg = {i: 0 for i in alive}
        for i in list(alive):
            for j in succ[i]:
                if j in alive:
                    outdeg[i] += 1
                    indeg[j] += 1
        for l in list(alive):
            if indeg[l] == 0 or outdeg[l] == 0:
                alive.discard(l)
                changed = True
    if not alive:
        raise TruncationError(
            f"no admissible cycle among letters 0..{max_letter}; truncation is empty"
        )
    return _make_finite(spec, max_letter, alive, succ, transitive=False)


def is_transitive(finite: FiniteShift) -> bool:
    """Strong connectivity of the finite transition structure."""
    comps = strongly_connected_components(finite.letters, lambda l: finite.succ[l])
    return len(comps) == 1


def transitive_core(finite: FiniteShift, required: Iterable[int]) -> FiniteShift:
    """The strongly connected component through the required letters.

    Raises ``TransitivityError`` naming the separating groups when the
    required letters spread over several components; the caller should
    retry with a larger truncation bound.
    """
    req = sorted(set(required))
    missing = [l for l in req if l not in finite.pred]
    if missing:
        raise TransitivityError(
            f"letters {missing} are not present in the truncation", tuple()
        )
    comps = strongly_connected_components(finite.letters, lambda l: finite.succ[l])
    comp_of: dict[int, int] = {}
    for ci, comp in enumerate(comps):
        for l in comp:
            comp_of[l] = ci
    if not req:
        req = [finite.letters[0]]
    hit = sorted({comp_of[l] for l in req})
    if len(hit) > 1:
        groups = tuple(
            sorted(tuple(l for l in req if comp_of[l] == ci) for ci in hit)
        )
        raise TransitivityError(
            f"required letters split across {len(hit)} components: "
            + ", ".join(str(list(g)) for g in groups),
            groups,
        )
    core = comps[hit[0]]
    return _make_finite(
        finite.spec,
        finite.truncation_bound,
        core,
        {i: finite.succ[i] for i in core},
        transitive=True,
    )


# ---------------------------------------------------------------------------
# boundedness of incoming / outgoing transition sets


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of a bounded-incoming or bounded-outgoing check."""

    condition: str  # "BP" or "BI"
    status: str  # SATISFIED | REFUTED | UNDECIDED
    bound: int | None
    witnesses: tuple[int, ...]
    detail: str


def _renewal_non_entries(spec: ShiftSpec, horizon: int) -> list[int]:
    return [j for j in range(1, horizon + 1) if not renewal_is_entry(spec, j)]


def check_bp(spec: ShiftSpec, horizon: int = 100) -> ConditionVerdict:
    """Does some finite prefix of the alphabet reach every letter in one step?

    Satisfied with bound N when every letter j has an admissible i -> j
    with i <= N.  Exact for the generator kinds; for oracle shifts only a
    within-horizon refutation is decidable.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if spec.kind == KIND_FULL:
        return ConditionVerdict(
            "BP", SATISFIED, 0, (), "every letter is reachable from letter 0"
        )
    if spec.kind == KIND_EXPLICIT:
        n = spec.alphabet_size - 1  # type: ignore[operator]
        return ConditionVerdict(
            "BP", SATISFIED, n, (), "finite alphabet: all sources lie below the max letter"
        )
    if spec.kind == KIND_RENEWAL:
        a, b = spec.renewal_rule  # type: ignore[misc]
        if a == 1:
            # entries are cofinite; only letters 1..b lack an entry edge and
            # they are reached from the step-down edge j+1 -> j.
            bound = b + 1 if b >= 1 else 0
            return ConditionVerdict(
                "BP",
                SATISFIED,
                bound,
                (),
                f"entries cover every letter above {b}; letters 1..{b} enter from one step up",
            )
        wit = tuple(_renewal_non_entries(spec, horizon)[:MAX_WITNESSES])
        return ConditionVerdict(
            "BP",
            REFUTED,
            None,
            wit,
            "infinitely many letters miss the entry rule and are entered only from one step above",
        )
    # oracle: horizon-bounded scan
    min_in: dict[int, int | None] = {}
    for j in range(horizon + 1):
        found = None
        for i in range(horizon + 1):
            if admissible(spec, i, j):
                found = i
                break
        min_in[j] = found
    bad = tuple(j for j in range(horizon + 1) if min_in[j] is None)[:MAX_WITNESSES]
    if bad:
        return ConditionVerdict(
            "BP",
            REFUTED,
            None,
            bad,
            f"letters with no incoming edge from any source <= {horizon}",
        )
    return ConditionVerdict(
        "BP",
        UNDECIDED,
        None,
        (),
        f"every letter <= {horizon} has a bounded source, but the alphabet continues",
    )


def check_bi(spec: ShiftSpec, horizon: int = 100) -> ConditionVerdict:
    """Mirror of ``check_bp`` for outgoing edges: j -> i with i <= N."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if spec.kind == KIND_FULL:
        return ConditionVerdict("BI", SATISFIED, 0, (), "every letter steps to letter 0")
    if spec.kind == KIND_EXPLICIT:
        n = spec.alphabet_size - 1  # type: ignore[operator]
        return ConditionVerdict(
            "BI", SATISFIED, n, (), "finite alphabet: all targets lie below the max letter"
        )
    if spec.kind == KIND_RENEWAL:
        wit = tuple(range(2, min(horizon, 2 + MAX_WITNESSES - 1) + 1))
        return ConditionVerdict(
            "BI",
            REFUTED,
            None,
            wit,
            "the only edge out of a letter j >= 1 is the step down to j-1, "
            "so no finite target set serves all letters",
        )
    min_out: dict[int, int | None] = {}
    for j in range(horizon + 1):
        found = None
        for i in range(horizon + 1):
            if admissible(spec, j, i):
                found = i
                break
        min_out[j] = found
    bad = tuple(j for j in range(horizon + 1) if min_out[j] is None)[:MAX_WITNESSES]
    if bad:
        return ConditionVerdict(
            "BI",
            REFUTED,
            None,
            bad,
            f"letters with no outgoing edge to any target <= {horizon}",
        )
    return ConditionVerdict(
        "BI",
        UNDECIDED,
        None,
        (),
        f"every letter <= {horizon} has a bounded target, but the alphabet continues",
    )


def covering_core(
    spec: ShiftSpec, letters: Iterable[int], attempt_budget: int = 64
) -> FiniteShift:
    """Smallest-by-search transitive core containing the requested letters.

    Raises the bound one letter at a time until the truncation's strongly
    connected component through the requested letters covers them all; a
    renewal truncation ending between entry letters strands its top and
    needs such an advance.
    """
    cap = spec.max_letter()
    wanted = sorted(set(letters))
    if not wanted or wanted[0] < 0:
        raise ValueError("letters to cover must be a nonempty set of nonnegative ints")
    if cap is not None:
        wanted = [l for l in wanted if l <= cap] or [0]
    bound = wanted[-1]
    for _ in range(attempt_budget):
        try:
            fin = truncate(spec, bound)
            core = transitive_core(fin, [l for l in wanted if l in fin.pred])
        except (TruncationError, TransitivityError):
            core = None
        if core is not None and all(l in core.pred for l in wanted):
            return core
        if cap is not None and bound >= cap:
            break
        bound += 1
    raise TruncationError(
        f"no transitive truncation covering letters {wanted} found up to bound {bound}"
    )


def connecting_word(finite: FiniteShift, a: int, b: int) -> Word:
    """Shortest word w making a.w.b admissible; lexicographically least on ties.

    The word may be empty (a -> b is a direct edge).  Raises ValueError
    when b is unreachable from a, which cannot happen on a transitive core.
    """
    if a not in finite.pred or b not in finite.pred:
        raise ValueError(f"letters {a}, {b} must both lie in the truncation")
    if not finite.succ[a]:
        raise ValueError(f"letter {a} has no outgoing edge")
    # edge counts to b, via a reverse breadth-first sweep
    dist_to_b, _ = layered_bfs_parents([b], lambda l: finite.pred[l])
    reachable = [s for s in finite.succ[a] if s in dist_to_b]
    if not reachable:
        raise ValueError(f"letter {b} is not reachable from letter {a}")
    length = min(dist_to_b[s] for s in reachable)
    word: list[int] = []
    frontier = a
    remaining = length
    while remaining > 0:
        nxt = min(
            t for t in finite.succ[frontier] if dist_to_b.get(t, -1) == remaining
        )
        word.append(nxt)
        frontier = nxt
        remaining -= 1
    return tuple(word)
