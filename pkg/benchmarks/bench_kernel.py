"""Compiled vs pure-Python search kernel on exact packing and linkage queries.

    python benchmarks/bench_kernel.py [--seeds 40] [--grid 6]
"""

import argparse
import random
import sys
import time
from pathlib import Path

import networkx as nx

from dpath import _pykernel, kernel
from dpath.graph_core import exact_max_disjoint, solve_disjoint_pairs

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from oracles import random_instance  # noqa: E402


def use(impl):
    kernel.pack_valid = impl.pack_valid
    kernel.link_pairs = impl.link_pairs


def packing_workload(seeds):
    out = []
    for seed in range(seeds):
        rng = random.Random(seed)
        k = rng.randint(2, 3)
        out.append(random_instance(rng, rng.randint(10, 14), rng.uniform(0.2, 0.45), rng.randint(4, 8),
                                   rng.uniform(0.2, 0.6), k))
    return out


def linkage_workload(side):
    g = nx.grid_2d_graph(side, side)
    pairs = [((0, i), (side - 1, side - 1 - i)) for i in range(min(3, side))]
    return g, pairs


def timed(fn):
    t = time.perf_counter()
    res = fn()
    return time.perf_counter() - t, res


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=40)
    ap.add_argument("--grid", type=int, default=6)
    args = ap.parse_args()
    insts = packing_workload(args.seeds)
    g, pairs = linkage_workload(args.grid)
    impls = [("python", _pykernel)]
    if kernel.BACKEND == "cython":
        from dpath import _kernel
        impls.insert(0, ("cython", _kernel))
    else:
        print("compiled kernel not built; timing the Python kernel only")
    results = {}
    for name, impl in impls:
        use(impl)
        tp, packs = timed(lambda: [exact_max_disjoint(i) is not None for i in insts])
        tl, link = timed(lambda: solve_disjoint_pairs(g, pairs) is not None)
        results[name] = (packs, link)
        print(f"{name:7s} packing {len(insts)} instances: {tp:8.3f}s   grid {args.grid}x{args.grid} linkage: {tl:8.3f}s")
    if len(results) == 2:
        assert results["cython"] == results["python"], "backends disagree"
        print("backends agree")


if __name__ == "__main__":
    main()
