#!/usr/bin/env python3
"""Soak test: optimizer and barrier against brute-force enumeration.

Draws seeded random strongly connected graphs, compares the package's
mean and barrier against an independent exhaustive enumeration written
here (deliberately not shared with the library), and reports the worst
absolute deviations seen.  Exits nonzero past --tol.
"""

import argparse
import random
import sys
import time
from fractions import Fraction

from peierls import compute_barrier, graph_from_weights, optimize


def successors(weights):
    succ = {}
    for u, v in weights:
        succ.setdefault(u, []).append(v)
        succ.setdefault(v, [])
    return succ


def brute_max_mean(weights):
    succ = successors(weights)
    best = None
    vertices = sorted(succ)

    def extend(start, path, seen):
        nonlocal best
        for nxt in succ[path[-1]]:
            if nxt == start:
                cycle = path + [start]
                total = Fraction(0)
                for a, b in zip(cycle, cycle[1:]):
                    total += Fraction(weights[(a, b)])
                mean = total / (len(cycle) - 1)
                if best is None or mean > best:
                    best = mean
            elif nxt > start and nxt not in seen:
                extend(start, path + [nxt], seen | {nxt})

    for start in vertices:
        extend(start, [start], {start})
    return float(best)


def brute_barrier(weights, base, mean):
    succ = successors(weights)
    best = {v: float("-inf") for v in succ}
    best[base] = 0.0

    def extend(path, seen, total):
        for nxt in succ[path[-1]]:
            if nxt in seen:
                continue
            reduced = total + weights[(path[-1], nxt)] - mean
            if reduced > best[nxt]:
                best[nxt] = reduced
            extend(path + [nxt], seen | {nxt}, reduced)

    extend([base], {base}, 0.0)
    return best


def random_graph(rng, n):
    weights = {}
    for i in range(n):
        weights[(i, (i + 1) % n)] = rng.randint(-10, 10)
    for i in range(n):
        for j in range(n):
            if (i, j) not in weights and rng.random() < 0.3:
                weights[(i, j)] = rng.randint(-10, 10)
    return weights


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=500)
    parser.add_argument("--max-vertices", type=int, default=7)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, default=1e-9)
    args = parser.parse_args(argv)

    rng = random.Random(args.seed)
    worst_mean = 0.0
    worst_barrier = 0.0
    started = time.perf_counter()
    for _ in range(args.count):
        weights = random_graph(rng, rng.randint(1, args.max_vertices))
        g = optimize(graph_from_weights(weights))
        worst_mean = max(worst_mean, abs(g.max_mean - brute_max_mean(weights)))
        result = compute_barrier(g)
        oracle = brute_barrier(weights, result.base_vertex, g.max_mean)
        for v, value in result.values.items():
            worst_barrier = max(worst_barrier, abs(value - oracle[v]))
    elapsed = time.perf_counter() - started

    print(f"graphs checked        {args.count}")
    print(f"worst mean deviation  {worst_mean:.3e}")
    print(f"worst barrier deviation {worst_barrier:.3e}")
    print(f"elapsed               {elapsed:.2f}s")
    if worst_mean > args.tol or worst_barrier > args.tol:
        print("deviation beyond tolerance", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
