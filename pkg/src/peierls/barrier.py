"""Transition-cost function of a maximizing cycle, with a priori bounds.

The barrier value at a vertex is the supremum, over all finite walks from
the base vertex, of the walk's weight after subtracting the maximum cycle
mean from every edge.  On a strongly connected graph the supremum is
attained by a simple path: any walk that revisits a vertex contains a
cycle, the cycle's reduced weight is at most zero, and cutting it out
never lowers the total.  Removing cycles until none remain leaves a
simple path with at least the original reduced weight, so a longest-walk
sweep over |V| - 1 rounds computes the barrier exactly and a positive
cycle is the only way the iteration could fail to settle.

The base vertex is the canonical maximizing cycle's starting phase.  Its
own barrier value is zero: the empty walk contributes weight zero, and no
reduced walk from the base back to itself can be positive.

Beyond the exact values on a finite truncation, this module bounds how
the values would extend across a countable alphabet: a per-letter ceiling
from the cost of connecting the letter to the base, a global ceiling from
one-step excursions off low letters and from partial laps of the
maximizing cycle, and the two-stage cutoff estimate that predicts which
truncation bound is large enough for the values near a given letter to
stop moving.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .optimizer import DEFAULT_TOL, GraphError, WeightedMemoryGraph, _longest_walk
from .potential import (
    PotentialSpec,
    ambient_total_variation,
    coercive_letter_bound,
    inf_bound_on_letter,
)
from .shift_space import (
    FiniteShift,
    ShiftSpec,
    TransitivityError,
    TruncationError,
    Word,
    connecting_word,
    covering_core,
    is_transitive,
)

Vertex = Word


@dataclass(frozen=True)
class UpperBoundReport:
    """A priori ceilings on barrier values, computed without the walk DP."""

    per_letter: Mapping[int, float]
    low_letter_peak: float
    base_cycle_peak: float
    low_letter_cutoff: int
    ambient_variation: float
    global_bound: float


@dataclass(frozen=True)
class BarrierResult:
    base_vertex: Vertex
    values: Mapping[Vertex, float]
    max_mean: float
    bounds: UpperBoundReport | None


@dataclass(frozen=True)
class CutoffReport:
    """Two-stage truncation estimate for one letter of interest.

    ``excursion_cutoff`` is the first stage's ceiling on letters a
    maximizing excursion near the letter can visit; ``confinement_bound``
    is the second stage's ceiling computed over a transitive core wide
    enough to contain every letter below the first ceiling.  Truncations
    at or beyond ``confinement_bound`` leave the barrier unchanged near
    the letter of interest.
    """

    letter: int
    excursion_cutoff: int
    confinement_bound: int
    local_connect_len: int
    wide_connect_len: int
    wide_bound: int


def compute_barrier(graph: WeightedMemoryGraph, tol: float = DEFAULT_TOL) -> BarrierResult:
    """Barrier values from the canonical cycle's base vertex, base pinned to 0.0."""
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before computing the barrier")
    base = graph.critical_cycle[0]
    raw = _longest_walk(graph, {base: 0.0}, graph.max_mean, tol)
    stuck = sorted(v for v, x in raw.items() if x == float("-inf"))
    if stuck:
        raise GraphError(f"vertices unreachable from the base vertex: {stuck[:4]}")
    shift = raw[base]
    values = {v: (x - shift) + 0.0 for v, x in raw.items()}
    bounds = None
    if graph.shift is not None and graph.pot is not None:
        bounds = _bound_report(graph, values)
    return BarrierResult(base_vertex=base, values=values, max_mean=graph.max_mean, bounds=bounds)


def _bound_report(graph: WeightedMemoryGraph, values: Mapping[Vertex, float]) -> UpperBoundReport:
    finite = graph.shift
    pot = graph.pot
    m = graph.max_mean
    ambient = ambient_total_variation(pot)
    per_letter = {
        a: barrier_upper_bound(graph, finite, pot, a) for a in finite.letters
    }

    cycle = graph.critical_cycle
    lap = 0.0
    cycle_peak = 0.0
    for i, u in enumerate(cycle):
        v = cycle[(i + 1) % len(cycle)]
        lap += graph.weights[(u, v)] - m
        cycle_peak = max(cycle_peak, lap)

    cutoff = coercive_letter_bound(pot, m - ambient)
    low_peak = float("-inf")
    for j in finite.letters:
        if j > cutoff:
            continue
        targets = sorted(
            {x for u in graph.vertices if u[0] == j for x in graph.succ[u]}
        )
        if targets:
            low_peak = max(low_peak, values[targets[0]])

    return UpperBoundReport(
        per_letter=per_letter,
        low_letter_peak=low_peak,
        base_cycle_peak=cycle_peak,
        low_letter_cutoff=cutoff,
        ambient_variation=ambient,
        global_bound=max(low_peak, cycle_peak) + ambient,
    )


def barrier_length_profile(
    graph: WeightedMemoryGraph, vertex: Vertex, n_max: int
) -> tuple[float, ...]:
    """Best reduced weight of a length-n walk from the base to ``vertex``, n = 0..n_max.

    Unreachable lengths give -inf; the barrier value is the supremum of
    the profile as n_max grows.
    """
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before computing walk profiles")
    if vertex not in graph.succ:
        raise GraphError(f"unknown vertex {vertex!r}")
    if n_max < 0:
        raise GraphError("n_max must be nonnegative")
    base = graph.critical_cycle[0]
    m = graph.max_mean
    neg_inf = float("-inf")
    current: dict[Vertex, float] = {base: 0.0}
    profile = [0.0 if vertex == base else neg_inf]
    for _ in range(n_max):
        nxt: dict[Vertex, float] = {}
        for u, val in current.items():
            for x in graph.succ[u]:
                cand = val + graph.weights[(u, x)] - m
                if cand > nxt.get(x, neg_inf):
                    nxt[x] = cand
        profile.append(nxt.get(vertex, neg_inf))
        current = nxt
    return tuple(profile)


def barrier_upper_bound(
    graph: WeightedMemoryGraph, finite: FiniteShift, pot: PotentialSpec, letter: int
) -> float:
    """Ceiling on barrier values at vertices starting with ``letter``.

    Any walk from the base to such a vertex can be closed into a periodic
    word through a shortest connecting word back to the base letter; the
    closed lap has mean at most the maximum, which caps the open part by
    the connector's length times (mean - cheapest letter value) plus the
    variation correction.
    """
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before bounding the barrier")
    if letter not in finite.pred:
        raise GraphError(f"letter {letter} is not in the truncation")
    base_letter = graph.critical_cycle[0][0]
    word = connecting_word(finite, letter, base_letter)
    involved = {letter, base_letter, *word}
    floor = min(inf_bound_on_letter(pot, l) for l in involved)
    return (len(word) + 1) * (graph.max_mean - floor) + ambient_total_variation(pot)


def _max_pairwise_connect(core: FiniteShift) -> int:
    """Largest over ordered letter pairs (i, b) of the least edge count i -> b."""
    worst = 1
    for b in core.letters:
        dist = {b: 0}
        frontier = [b]
        while frontier:
            nxt = []
            for x in frontier:
                for p in core.pred[x]:
                    if p not in dist:
                        dist[p] = dist[x] + 1
                        nxt.append(p)
            frontier = nxt
        for i in core.letters:
            if i == b:
                d = min(dist[s] for s in core.succ[b]) + 1
            else:
                d = dist[i]
            if d > worst:
                worst = d
    return worst


def letter_cutoff(
    spec: ShiftSpec,
    pot: PotentialSpec,
    finite: FiniteShift,
    letter: int,
    wide_budget: int = 4096,
) -> CutoffReport:
    """Truncation bound past which barrier values near ``letter`` are final.

    Stage one bounds the letters a maximizing excursion can visit before
    returning near ``letter``, using connecting words inside the given
    core.  Stage two replays the argument on a transitive core wide
    enough to contain all of stage one's letters, which confines every
    maximizing walk below the reported bound.  ``wide_budget`` caps the
    stage-two alphabet; slowly decaying tails can push the first-stage
    cutoff beyond any practical truncation, and that failure is reported
    rather than silently computed.
    """
    if letter not in finite.pred:
        raise GraphError(f"letter {letter} is not in the truncation")
    if not is_transitive(finite):
        raise TransitivityError("the truncation handed to letter_cutoff must be transitive")

    local_len = max(
        len(connecting_word(finite, i, letter)) + 1 for i in finite.letters
    )
    floor = min(inf_bound_on_letter(pot, i) for i in finite.letters)
    ambient = ambient_total_variation(pot)
    threshold = min(local_len * floor - ambient, 0.0)
    excursion_cutoff = coercive_letter_bound(pot, threshold)

    target = excursion_cutoff + 1
    if target > wide_budget:
        raise TruncationError(
            f"stage-two alphabet for letter {letter} needs letters up to {target}, "
            f"beyond the budget {wide_budget}"
        )
    needed = set(range(target + 1)) | set(finite.letters)
    core = covering_core(spec, needed)
    wide_len = _max_pairwise_connect(core)
    wide_floor = min(inf_bound_on_letter(pot, i) for i in core.letters)
    confinement = coercive_letter_bound(pot, wide_len * wide_floor - ambient) + 1
    return CutoffReport(
        letter=letter,
        excursion_cutoff=excursion_cutoff,
        confinement_bound=confinement,
        local_connect_len=local_len,
        wide_connect_len=wide_len,
        wide_bound=max(core.letters),
    )
