"""Deterministic digraph helpers shared by the shift and optimizer layers."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence, TypeVar

N = TypeVar("N", bound=Hashable)


def strongly_connected_components(
    nodes: Sequence[N], succ: Callable[[N], Iterable[N]]
) -> list[list[N]]:
    """Tarjan's algorithm, iterative so deep truncations cannot overflow the stack.

    Components come out in reverse topological order; each component is
    sorted ascending so the result is deterministic for a given node order.
    """
    index: dict[N, int] = {}
    low: dict[N, int] = {}
    on_stack: set[N] = set()
    stack: list[N] = []
    comps: list[list[N]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        frames: list[tuple[N, Iterable[N]]] = [(root, iter(succ(root)))]
        while frames:
            node, it = frames[-1]
            advanced = False
            for child in it:
                if child not in index:
                    index[child] = low[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    frames.append((child, iter(succ(child))))
                    advanced = True
                    break
                if child in on_stack and index[child] < low[node]:
                    low[node] = index[child]
            if advanced:
                continue
            frames.pop()
            if frames:
                parent = frames[-1][0]
                if low[node] < low[parent]:
                    low[parent] = low[node]
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                comps.append(sorted(comp))
    return comps


def is_strongly_connected(nodes: Sequence[N], succ: Callable[[N], Iterable[N]]) -> bool:
    if not nodes:
        return False
    return len(strongly_connected_components(nodes, succ)) == 1


def layered_bfs_parents(
    starts: Sequence[N], succ: Callable[[N], Iterable[N]]
) -> tuple[dict[N, int], dict[N, N | None]]:
    """Breadth-first distances and parents, expanding each layer in sorted order.

    Ties between equally short paths resolve toward the smallest parent seen
    first, which keeps reconstructed paths deterministic.
    """
    dist: dict[N, int] = {}
    parent: dict[N, N | None] = {}
    layer = sorted(starts)
    for s in layer:
        if s not in dist:
            dist[s] = 0
            parent[s] = None
    d = 0
    while layer:
        nxt: list[N] = []
        for node in layer:
            for child in succ(node):
                if child not in dist:
                    dist[child] = d + 1
                    parent[child] = node
                    nxt.append(child)
        layer = sorted(set(nxt))
        d += 1
    return dist, parent
