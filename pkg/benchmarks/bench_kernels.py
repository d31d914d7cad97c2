#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-NumPy fallback.

Times the per-source BFS family on a synthetic scale-free digraph at a
few sizes and prints a speedup table. Run from the repo root:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --n 3000 --m 20000 --repeat 5
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from depnet._kernels import pure
from depnet.network import DependencyNetwork

try:
    from depnet import _speedups
except ImportError:
    _speedups = None


def scale_free_digraph(n: int, m: int, seed: int = 0) -> DependencyNetwork:
    rng = random.Random(seed)
    edges: set[tuple[int, int]] = {(1, 0)}
    targets = [0, 1]
    per_node = max(1, (m - n) // max(1, n - 2))
    for v in range(2, n):
        wired = False
        for _ in range(per_node):
            t = rng.choice(targets)
            if t != v and (v, t) not in edges:
                edges.add((v, t))
                targets.append(t)
                wired = True
        if not wired:
            edges.add((v, rng.randrange(v)))
            targets.append(v - 1)
    while len(edges) < m:
        a = rng.randrange(n)
        b = rng.choice(targets)
        if a != b and (a, b) not in edges:
            edges.add((a, b))
            targets.append(b)
    return DependencyNetwork([f"c{i:05d}" for i in range(n)], sorted(edges))


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(net: DependencyNetwork, repeat: int, sources: int) -> list[tuple[str, float, float]]:
    out_ptr, out_idx = net.out_csr
    und_ptr, und_idx = net.und_csr
    n = net.n
    hi = min(sources, n)  # identical bounded workload for both backends
    cases = [
        (f"distance_stats directed ({hi} src)",
         lambda mod: mod.distance_stats(out_ptr, out_idx, n, 0, hi)),
        (f"distance_stats undirected ({hi} src)",
         lambda mod: mod.distance_stats(und_ptr, und_idx, n, 0, hi)),
        (f"betweenness directed ({hi} src)",
         lambda mod: mod.betweenness_partial(out_ptr, out_idx, n, 0, hi)),
        ("triangle_counts (all nodes)",
         lambda mod: mod.triangle_counts(und_ptr, und_idx, n)),
    ]
    rows = []
    for label, call in cases:
        t_pure = timeit(lambda: call(pure), repeat)
        t_fast = timeit(lambda: call(_speedups), repeat) if _speedups else float("nan")
        rows.append((label, t_pure, t_fast))
    return rows


def check_agreement(net: DependencyNetwork, sources: int) -> float:
    """Max deviation between backends on this graph (sanity, not a test)."""
    if _speedups is None:
        return float("nan")
    out_ptr, out_idx = net.out_csr
    n = net.n
    hi = min(sources, n)
    sa, ca, ia = _speedups.distance_stats(out_ptr, out_idx, n, 0, hi)
    sb, cb, ib = pure.distance_stats(out_ptr, out_idx, n, 0, hi)
    ba = _speedups.betweenness_partial(out_ptr, out_idx, n, 0, hi)
    bb = pure.betweenness_partial(out_ptr, out_idx, n, 0, hi)
    return max(
        float(np.abs(sa - sb).max()),
        float(np.abs(ca - cb).max()),
        float(np.abs(ia - ib).max()),
        float(np.abs(ba - bb).max()),
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1500)
    parser.add_argument("--m", type=int, default=10000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--sources", type=int, default=256,
                        help="source range timed for the per-source kernels")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _speedups is None:
        print("compiled extension not available; timing the fallback only\n")

    net = scale_free_digraph(args.n, args.m, seed=args.seed)
    print(f"graph: n={net.n} m={net.m} (seed {args.seed})")
    dev = check_agreement(net, args.sources)
    print(f"backend agreement: max deviation {dev:.2e}\n")

    rows = bench(net, args.repeat, args.sources)
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}")
    for label, t_pure, t_fast in rows:
        speed = t_pure / t_fast if t_fast == t_fast and t_fast > 0 else float("nan")
        fast_txt = f"{t_fast * 1e3:9.1f}ms" if t_fast == t_fast else "       n/a"
        print(f"{label:<{width}}  {t_pure * 1e3:9.1f}ms  {fast_txt}  {speed:7.1f}x")


if __name__ == "__main__":
    main()
