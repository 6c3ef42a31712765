"""Compare the numba and numpy search engines on full reachable-set exhaustion.

    python3 benchmarks/bench_oracle.py [--repeat 3]
"""

import argparse
import os
import time

from isreconf import _search
from isreconf.graph import cycle_graph, grid_graph, path_graph, spider_graph

CASES = [
    ("path P40, k=3, TS", path_graph(40), [0, 2, 4], True),
    ("grid 5x6, k=4, TS", grid_graph(5, 6), [0, 2, 4, 13], True),
    ("cycle C24, k=5, TJ", cycle_graph(24), [0, 2, 4, 6, 8], False),
    ("spider 6x3, k=4, TS", spider_graph(6, 3), [3, 6, 9, 12], True),
    ("grid 6x7, k=4, TJ", grid_graph(6, 7), [0, 2, 4, 6], False),
]


def run(engine, g, start, sliding):
    os.environ["ISRECONF_BACKEND"] = engine
    t0 = time.perf_counter()
    out = _search.search(g.adj, g.n, start, None, sliding, 50_000_000, 600.0)
    return time.perf_counter() - t0, out.count


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    run("numba", path_graph(4), [0], True)  # compile outside the timings
    print(f"{'case':<24}{'configs':>10}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, g, start, sliding in CASES:
        best = {}
        for engine in ("numba", "numpy"):
            times = []
            for _ in range(args.repeat):
                dt, count = run(engine, g, start, sliding)
                times.append(dt)
            best[engine] = (min(times), count)
        if best["numba"][1] != best["numpy"][1]:
            raise SystemExit(f"{name}: engines disagree on the reachable-set size")
        nb, npy = best["numba"][0], best["numpy"][0]
        print(f"{name:<24}{best['numba'][1]:>10}{nb:>10.3f}{npy:>10.3f}{npy / nb:>8.1f}x")


if __name__ == "__main__":
    main()
