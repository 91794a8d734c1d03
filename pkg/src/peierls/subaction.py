"""Subactions on a weighted memory graph: checks, constructions, comparisons.

A subaction assigns a value to every vertex so that along each edge the
reduced weight (edge weight minus the maximum cycle mean) is at most the
value difference.  It is calibrated when every vertex has at least one
incoming edge attaining equality; those tight edges are the contact
edges, and every maximizing cycle consists of them.

The barrier from the base vertex is one calibrated subaction, and it is
minimal: every subaction vanishing at the base dominates it.  Another
construction runs the longest-walk dynamic program from a seed given on
the critical class; when the seed is consistent along the tight edges
inside each critical component, the result is a calibrated fixpoint of
the one-step transfer operator.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Mapping

from .optimizer import DEFAULT_TOL, GraphError, WeightedMemoryGraph, _longest_walk
from .potential import PotentialSpec, var_j
from .shift_space import FiniteShift, Word

Vertex = Word
Edge = tuple


class SeedConsistencyError(ValueError):
    """Seed values disagree with the tight-edge increments they must follow."""


@dataclass(frozen=True)
class SubactionReport:
    values: Mapping[Vertex, float]
    is_subaction: bool
    worst_violation: float
    is_calibrated: bool
    uncalibrated_vertices: tuple[Vertex, ...]
    contact_edges: frozenset[Edge]
    contact_slacks: Mapping[Edge, float]
    supp_in_contact: bool


@dataclass(frozen=True)
class PreorbitReport:
    sequence: tuple[Vertex, ...]
    tail_in_critical_class: bool
    entered_at: int | None


@dataclass(frozen=True)
class MinimalityReport:
    ok: bool
    worst_margin: float
    worst_vertex: Vertex


@dataclass(frozen=True)
class ComparisonReport:
    is_constant_diff: bool
    constant: float
    max_deviation: float


@dataclass(frozen=True)
class UniquenessReport:
    comparison: ComparisonReport
    critical_class_unique: bool
    consistent: bool
    note: str


@dataclass(frozen=True)
class VariationReport:
    entries: tuple[tuple[int, float, float], ...]
    within_bounds: bool


def _edge_slack(
    graph: WeightedMemoryGraph, values: Mapping[Vertex, float], u: Vertex, v: Vertex
) -> float:
    return values[v] - values[u] + graph.max_mean - graph.weights[(u, v)]


def verify_subaction(
    graph: WeightedMemoryGraph, values: Mapping[Vertex, float], tol: float = DEFAULT_TOL
) -> SubactionReport:
    """Check the subaction inequality edge by edge and locate the contact set."""
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before verifying subactions")
    missing = sorted(set(graph.succ) - set(values))
    if missing:
        raise GraphError(f"values missing for vertices: {missing[:4]}")

    worst = 0.0
    contact: set[Edge] = set()
    slacks: dict[Edge, float] = {}
    for (u, v), _ in graph.edge_list():
        slack = _edge_slack(graph, values, u, v)
        if -slack > worst:
            worst = -slack
        if abs(slack) <= tol:
            contact.add((u, v))
            slacks[(u, v)] = slack

    uncalibrated = tuple(
        v
        for v in graph.vertices
        if not any((u, v) in contact for u in graph.pred[v])
    )
    cycle = graph.critical_cycle
    cycle_edges = {
        (cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))
    }
    return SubactionReport(
        values=dict(values),
        is_subaction=worst <= tol,
        worst_violation=worst,
        is_calibrated=not uncalibrated,
        uncalibrated_vertices=uncalibrated,
        contact_edges=frozenset(contact),
        contact_slacks=slacks,
        supp_in_contact=cycle_edges <= contact,
    )


def calibrated_preorbit(
    graph: WeightedMemoryGraph,
    values: Mapping[Vertex, float],
    start: Vertex,
    steps: int,
    tol: float = DEFAULT_TOL,
) -> PreorbitReport:
    """Walk contact edges backwards from ``start``, least source first.

    The sequence runs (start, one step back, two steps back, ...).  The
    choice of least contact source is a function of the current vertex,
    so the sequence is eventually periodic and its cycle consists of
    tight edges, which places the tail inside the critical class.
    """
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before tracing preorbits")
    if start not in graph.succ:
        raise GraphError(f"unknown vertex {start!r}")
    if steps < 0:
        raise GraphError("steps must be nonnegative")

    sequence = [start]
    current = start
    for _ in range(steps):
        sources = [
            u
            for u in graph.pred[current]
            if abs(_edge_slack(graph, values, u, current)) <= tol
        ]
        if not sources:
            raise GraphError(
                f"no contact edge enters {current!r}; the values are not calibrated there"
            )
        current = min(sources)
        sequence.append(current)

    entered_at: int | None = None
    for idx in range(len(sequence), 0, -1):
        if sequence[idx - 1] not in graph.critical_class:
            break
        entered_at = idx - 1
    return PreorbitReport(
        sequence=tuple(sequence),
        tail_in_critical_class=sequence[-1] in graph.critical_class,
        entered_at=entered_at,
    )


def consistent_seed(
    graph: WeightedMemoryGraph,
    anchors: Mapping[Vertex, float] | None = None,
    tol: float = DEFAULT_TOL,
) -> dict[Vertex, float]:
    """Extend anchor values across the critical class along tight edges.

    Components without an anchor get value 0.0 at their least vertex.
    Tight edges pin every increment, so the extension is determined; a
    second anchor in the same component must agree with the propagated
    value or the seed is rejected.
    """
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before building seeds")
    anchors = dict(anchors or {})
    stray = sorted(set(anchors) - graph.critical_class)
    if stray:
        raise SeedConsistencyError(
            f"anchors must sit on the critical class; these do not: {stray[:4]}"
        )

    tight_succ: dict[Vertex, list[Vertex]] = {}
    for u, v in graph.critical_edges:
        tight_succ.setdefault(u, []).append(v)

    seed: dict[Vertex, float] = {}
    for comp in graph.critical_components:
        comp_anchors = sorted(v for v in anchors if v in set(comp))
        root = comp_anchors[0] if comp_anchors else comp[0]
        seed[root] = anchors.get(root, 0.0)
        frontier = [root]
        while frontier:
            u = frontier.pop()
            for v in tight_succ.get(u, ()):
                cand = seed[u] + graph.weights[(u, v)] - graph.max_mean
                if v in seed:
                    if abs(seed[v] - cand) > tol:
                        raise SeedConsistencyError(
                            f"tight edges force {cand!r} at {v!r} but the seed holds {seed[v]!r}"
                        )
                    continue
                seed[v] = cand
                frontier.append(v)
        for v in comp_anchors[1:]:
            if abs(seed[v] - anchors[v]) > tol:
                raise SeedConsistencyError(
                    f"anchor at {v!r} disagrees with the value propagated from {root!r}"
                )
            seed[v] = anchors[v]
    return seed


def fixpoint_subaction(
    graph: WeightedMemoryGraph, seed: Mapping[Vertex, float], tol: float = DEFAULT_TOL
) -> dict[Vertex, float]:
    """Calibrated subaction from a consistent seed on the critical class.

    The longest-walk sweep extends the seed to every vertex; seeds that
    break consistency along a tight edge would be silently overwritten by
    the sweep, so they are rejected up front.
    """
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before building subactions")
    if set(seed) != set(graph.critical_class):
        raise SeedConsistencyError(
            "seed must assign a value to every critical-class vertex and nothing else"
        )
    for u, v in sorted(graph.critical_edges):
        gap = seed[u] + graph.weights[(u, v)] - graph.max_mean - seed[v]
        if abs(gap) > tol:
            raise SeedConsistencyError(
                f"seed breaks the tight edge {u!r} -> {v!r} by {gap!r}"
            )
    values = _longest_walk(graph, dict(seed), graph.max_mean, tol)
    stuck = sorted(v for v, x in values.items() if x == float("-inf"))
    if stuck:
        raise GraphError(f"vertices unreachable from the critical class: {stuck[:4]}")
    return values


def one_step_image(
    graph: WeightedMemoryGraph, values: Mapping[Vertex, float]
) -> dict[Vertex, float]:
    """Transfer-operator image: best incoming value plus reduced weight."""
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before applying the operator")
    image: dict[Vertex, float] = {}
    for v in graph.vertices:
        preds = graph.pred[v]
        if not preds:
            raise GraphError(f"vertex {v!r} has no incoming edge")
        image[v] = max(
            values[u] + graph.weights[(u, v)] - graph.max_mean for u in preds
        )
    return image


def minimality_check(
    graph: WeightedMemoryGraph,
    candidate: Mapping[Vertex, float],
    barrier_values: Mapping[Vertex, float],
    tol: float = DEFAULT_TOL,
) -> MinimalityReport:
    """Check that a subaction dominates the barrier once pinned at the base.

    Walk weights bound value differences from below, so the barrier is
    the least subaction vanishing at the base vertex; a candidate falling
    below it somewhere is not a subaction at all.
    """
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before minimality checks")
    base = graph.critical_cycle[0]
    offset = candidate[base]
    worst_margin = float("inf")
    worst_vertex = base
    for v in graph.vertices:
        margin = (candidate[v] - offset) - barrier_values[v]
        if margin < worst_margin:
            worst_margin = margin
            worst_vertex = v
    return MinimalityReport(
        ok=worst_margin >= -tol, worst_margin=worst_margin, worst_vertex=worst_vertex
    )


def compare_up_to_constant(
    first: Mapping[Vertex, float],
    second: Mapping[Vertex, float],
    tol: float = DEFAULT_TOL,
) -> ComparisonReport:
    if set(first) != set(second):
        raise ValueError("value tables must cover the same vertices")
    diffs = [first[v] - second[v] for v in sorted(first)]
    constant = statistics.median(diffs)
    max_dev = max(abs(d - constant) for d in diffs)
    return ComparisonReport(
        is_constant_diff=max_dev <= tol, constant=constant, max_deviation=max_dev
    )


def uniqueness_comparison(
    graph: WeightedMemoryGraph,
    first: Mapping[Vertex, float],
    second: Mapping[Vertex, float],
    tol: float = DEFAULT_TOL,
) -> UniquenessReport:
    """Compare two candidates against the unique-class hypothesis.

    Calibrated subactions agree up to a constant exactly when the
    critical class has a single component; with several components the
    anchor of each can move independently and disagreement is expected.
    """
    if not graph.is_optimized():
        raise GraphError("graph must be optimized before uniqueness comparisons")
    comparison = compare_up_to_constant(first, second, tol)
    unique = bool(graph.critical_class_unique)
    parts = len(graph.critical_components)
    if unique and comparison.is_constant_diff:
        note = "single critical component; the candidates agree up to a constant."
    elif unique and not comparison.is_constant_diff:
        note = (
            "single critical component, yet the candidates differ by a non-constant; "
            "at least one of them is not a calibrated subaction."
        )
    elif comparison.is_constant_diff:
        note = (
            f"critical class splits into {parts} components, but these candidates "
            "happen to agree up to a constant."
        )
    else:
        note = (
            f"critical class splits into {parts} components, so the uniqueness "
            "hypothesis fails and the observed disagreement is expected."
        )
    return UniquenessReport(
        comparison=comparison,
        critical_class_unique=unique,
        consistent=not (unique and not comparison.is_constant_diff),
        note=note,
    )


def variation_of_subaction(
    values: Mapping[Vertex, float],
    finite: FiniteShift,
    pot: PotentialSpec,
    tol: float = DEFAULT_TOL,
) -> VariationReport:
    """Oscillation of vertex values on word prefixes versus the tail bound.

    Grouping vertices by their first n letters, the spread within a group
    is at most the summed oscillations of the weight function at depths
    n and beyond; depths past the table depth contribute nothing.
    """
    if not values:
        raise ValueError("values must be nonempty")
    lengths = {len(v) for v in values}
    if len(lengths) != 1:
        raise ValueError("vertex words must share one length")
    word_len = lengths.pop()

    entries: list[tuple[int, float, float]] = []
    ok = True
    for n in range(1, word_len + 1):
        groups: dict[Word, list[float]] = {}
        for v, x in values.items():
            groups.setdefault(v[:n], []).append(x)
        spread = max(max(g) - min(g) for g in groups.values())
        bound = float(sum(var_j(pot, finite, j) for j in range(n, pot.depth)))
        entries.append((n, spread, bound))
        if spread > bound + tol:
            ok = False
    return VariationReport(entries=tuple(entries), within_bounds=ok)
