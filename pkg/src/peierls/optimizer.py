"""Maximizing cycles of the weighted memory graph.

The memory graph turns Birkhoff sums of a finite-memory potential into
walk weights: vertices are admissible words of length max(depth-1, 1) and
an edge carries the potential's value on the depth-k word its endpoints
generate.  The ergodic maximum m is then the maximum cycle-mean weight,
found with Karp's dynamic program, and the critical class collects every
vertex on a cycle whose mean attains m.

Vertices only need to be hashable and mutually sortable; library callers
use letter words, tests are free to use bare integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .digraph import strongly_connected_components
from .potential import PotentialSpec, admissible_words, evaluate
from .shift_space import FiniteShift

Vertex = Any
Edge = tuple[Vertex, Vertex]

DEFAULT_TOL = 1e-9


class GraphError(ValueError):
    """The graph violates a structural precondition."""


class PositiveCycleError(RuntimeError):
    """A reduced cycle with positive weight survived; the mean value is inconsistent."""


@dataclass
class WeightedMemoryGraph:
    """Finite weighted digraph plus the optimization results, once computed.

    The structural fields are fixed at construction; ``optimize`` fills the
    ``max_mean`` / ``critical_*`` fields in place and downstream modules
    treat the whole object as read-only afterwards.
    """

    vertices: tuple[Vertex, ...]
    weights: dict[Edge, float]
    succ: dict[Vertex, tuple[Vertex, ...]]
    pred: dict[Vertex, tuple[Vertex, ...]]
    depth: int = 1
    shift: FiniteShift | None = None
    pot: PotentialSpec | None = None
    max_mean: float | None = None
    critical_cycle: tuple[Vertex, ...] | None = None
    critical_class: frozenset = field(default_factory=frozenset)
    critical_edges: frozenset = field(default_factory=frozenset)
    critical_components: tuple[tuple[Vertex, ...], ...] = ()
    critical_class_unique: bool | None = None

    def edge_list(self) -> list[tuple[Edge, float]]:
        return sorted(self.weights.items())

    def is_optimized(self) -> bool:
        return self.max_mean is not None


def graph_from_weights(weights: Mapping[Edge, float]) -> WeightedMemoryGraph:
    """Assemble a graph from an explicit edge-weight map (test entry point)."""
    if not weights:
        raise GraphError("graph needs at least one edge")
    verts = sorted({u for u, _ in weights} | {v for _, v in weights})
    succ: dict[Vertex, list[Vertex]] = {v: [] for v in verts}
    pred: dict[Vertex, list[Vertex]] = {v: [] for v in verts}
    for u, v in sorted(weights):
        succ[u].append(v)
        pred[v].append(u)
    return WeightedMemoryGraph(
        vertices=tuple(verts),
        weights={e: float(w) for e, w in weights.items()},
        succ={v: tuple(s) for v, s in succ.items()},
        pred={v: tuple(p) for v, p in pred.items()},
    )


def build_memory_graph(finite: FiniteShift, pot: PotentialSpec) -> WeightedMemoryGraph:
    """Depth-k encoding of a finite shift: walk weights are Birkhoff sums."""
    k = pot.depth
    vlen = max(k - 1, 1)
    verts = tuple(admissible_words(finite, vlen))
    if not verts:
        raise GraphError("the truncation admits no words of the memory length")
    weights: dict[Edge, float] = {}
    succ: dict[Vertex, list[Vertex]] = {v: [] for v in verts}
    pred: dict[Vertex, list[Vertex]] = {v: [] for v in verts}
    for u in verts:
        for letter in finite.succ[u[-1]]:
            v = u[1:] + (letter,) if k >= 2 else (letter,)
            weights[(u, v)] = evaluate(pot, u + (letter,))
            succ[u].append(v)
            pred[v].append(u)
    return WeightedMemoryGraph(
        vertices=verts,
        weights=weights,
        succ={v: tuple(s) for v, s in succ.items()},
        pred={v: tuple(sorted(p)) for v, p in pred.items()},
        depth=k,
        shift=finite,
        pot=pot,
    )


def _require_strongly_connected(graph: WeightedMemoryGraph) -> None:
    comps = strongly_connected_components(graph.vertices, lambda v: graph.succ[v])
    if len(comps) != 1:
        raise GraphError(
            f"graph must be strongly connected; found {len(comps)} components"
        )


def _karp_max_mean(graph: WeightedMemoryGraph) -> float:
    """Karp's formula: max over v of min over k of (D_n - D_k)/(n - k)."""
    n = len(graph.vertices)
    source = graph.vertices[0]
    table: list[dict[Vertex, float]] = [{source: 0.0}]
    for _ in range(n):
        prev = table[-1]
        cur: dict[Vertex, float] = {}
        for u, base in prev.items():
            for v in graph.succ[u]:
                cand = base + graph.weights[(u, v)]
                old = cur.get(v)
                if old is None or cand > old:
                    cur[v] = cand
        table.append(cur)
    best = -math.inf
    final = table[n]
    for v, top in final.items():
        worst = math.inf
        for k in range(n):
            base = table[k].get(v)
            if base is None:
                continue
            worst = min(worst, (top - base) / (n - k))
        if worst < math.inf and worst > best:
            best = worst
    if best == -math.inf:
        raise GraphError("no cycle is reachable from the least vertex")
    return best


def _longest_walk(
    graph: WeightedMemoryGraph,
    seeds: Mapping[Vertex, float],
    reduce_by: float,
    tol: float = DEFAULT_TOL,
) -> dict[Vertex, float]:
    """Maximum reduced-weight walk values from the seeded vertices.

    Bellman-Ford relaxation; with all reduced cycle weights nonpositive the
    optimum is attained on simple paths, so |V|-1 sweeps suffice.  A final
    check sweep turns any surviving improvement above the tolerance into
    ``PositiveCycleError``.
    """
    values: dict[Vertex, float] = {v: -math.inf for v in graph.vertices}
    for v, s in seeds.items():
        if v not in values:
            raise GraphError(f"seed vertex {v!r} is not in the graph")
        values[v] = float(s)
    edges = graph.edge_list()
    for _ in range(len(graph.vertices) - 1):
        changed = False
        for (u, v), w in edges:
            base = values[u]
            if base == -math.inf:
                continue
            cand = base + (w - reduce_by)
            if cand > values[v]:
                values[v] = cand
                changed = True
        if not changed:
            break
    for (u, v), w in edges:
        base = values[u]
        if base == -math.inf:
            continue
        if base + (w - reduce_by) > values[v] + tol:
            raise PositiveCycleError(
                f"reduced cycle with positive weight through edge {u!r} -> {v!r}"
            )
    return values


def _tight_adjacency(
    graph: WeightedMemoryGraph, h: Mapping[Vertex, float], mean: float, tol: float
) -> dict[Vertex, tuple[Vertex, ...]]:
    tight: dict[Vertex, list[Vertex]] = {v: [] for v in graph.vertices}
    for (u, v), w in graph.edge_list():
        if h[u] + (w - mean) >= h[v] - tol:
            tight[u].append(v)
    return {v: tuple(s) for v, s in tight.items()}


def _canonical_cycle(
    class_vertices: list[Vertex], tight_succ: Mapping[Vertex, tuple[Vertex, ...]]
) -> tuple[Vertex, ...]:
    """Minimal-length critical cycle, lexicographically least sequence on ties."""
    members = set(class_vertices)

    def steps_back_to(v: Vertex) -> list[set[Vertex]]:
        # reach[t] = vertices from which v is hit in exactly t tight edges
        reach = [{v}]
        for _ in range(len(class_vertices)):
            prev = reach[-1]
            reach.append({u for u in members if any(x in prev for x in tight_succ[u])})
        return reach

    girth = None
    start = None
    start_reach: list[set[Vertex]] | None = None
    for v in sorted(members):
        reach = steps_back_to(v)
        length = next(
            (t for t in range(1, len(reach)) if v in reach[t]),
            None,
        )
        if length is None:
            continue
        if girth is None or length < girth:
            girth, start, start_reach = length, v, reach
    if girth is None or start is None or start_reach is None:
        raise GraphError("critical class contains no cycle")
    cycle = [start]
    cur = start
    for step in range(1, girth):
        cur = min(x for x in tight_succ[cur] if x in start_reach[girth - step])
        cycle.append(cur)
    return tuple(cycle)


def optimize(graph: WeightedMemoryGraph, tol: float = DEFAULT_TOL) -> WeightedMemoryGraph:
    """Compute m, the critical class and a canonical critical cycle, in place."""
    if not graph.vertices:
        raise GraphError("graph has no vertices")
    _require_strongly_connected(graph)
    mean = _karp_max_mean(graph)
    h = _longest_walk(graph, {v: 0.0 for v in graph.vertices}, mean, tol)
    tight_succ = _tight_adjacency(graph, h, mean, tol)
    comps = strongly_connected_components(graph.vertices, lambda v: tight_succ[v])
    critical: list[list[Vertex]] = []
    for comp in comps:
        if len(comp) > 1 or comp[0] in tight_succ[comp[0]]:
            critical.append(comp)
    if not critical:
        raise GraphError("no critical cycle found at the computed mean")
    critical.sort(key=lambda comp: comp[0])
    class_set = frozenset(v for comp in critical for v in comp)
    comp_of = {v: idx for idx, comp in enumerate(critical) for v in comp}
    intra: dict[Vertex, tuple[Vertex, ...]] = {}
    edges: set[Edge] = set()
    for comp in critical:
        for u in comp:
            keep = tuple(v for v in tight_succ[u] if comp_of.get(v) == comp_of[u])
            intra[u] = keep
            edges.update((u, v) for v in keep)
    cycle = _canonical_cycle(sorted(class_set), intra)
    total = sum(
        graph.weights[(cycle[i], cycle[(i + 1) % len(cycle)])] for i in range(len(cycle))
    )
    graph.max_mean = total / len(cycle)
    graph.critical_cycle = cycle
    graph.critical_class = class_set
    graph.critical_edges = frozenset(edges)
    graph.critical_components = tuple(tuple(comp) for comp in critical)
    graph.critical_class_unique = len(critical) == 1 and all(
        len(intra[v]) == 1 for v in critical[0]
    )
    return graph


def max_mean_cycle(
    graph: WeightedMemoryGraph, tol: float = DEFAULT_TOL
) -> tuple[float, tuple[Vertex, ...]]:
    optimize(graph, tol)
    assert graph.max_mean is not None and graph.critical_cycle is not None
    return graph.max_mean, graph.critical_cycle


def birkhoff_sum(graph: WeightedMemoryGraph, walk: Sequence[Vertex]) -> float:
    """Weight of a vertex walk; Birkhoff sum of the spelled orbit segment."""
    total = 0.0
    for u, v in zip(walk, walk[1:]):
        w = graph.weights.get((u, v))
        if w is None:
            raise GraphError(f"walk uses the missing edge {u!r} -> {v!r}")
        total += w
    return total


@dataclass(frozen=True)
class PeriodicMeasure:
    """Uniform invariant measure carried by a cycle."""

    cycle: tuple[Vertex, ...]
    weights: tuple[float, ...]
    f_integral: float

    def expect(self, fn) -> float:
        """Average of a vertex function over the orbit points."""
        return sum(w * fn(v) for v, w in zip(self.cycle, self.weights))


def periodic_measure(
    graph: WeightedMemoryGraph, cycle: Sequence[Vertex]
) -> PeriodicMeasure:
    if not cycle:
        raise GraphError("cycle must be nonempty")
    closed = list(cycle) + [cycle[0]]
    integral = birkhoff_sum(graph, closed) / len(cycle)
    n = len(cycle)
    return PeriodicMeasure(
        cycle=tuple(cycle), weights=(1.0 / n,) * n, f_integral=integral
    )
