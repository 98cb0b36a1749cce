"""Compare the compiled and pure-Python automorphism kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

from thlim import kernels
from thlim.automorphisms import enumerate_automorphisms
from thlim.families import linear_order, pure_set, symmetric_group, vector_space

CASES = [
    ("pure set, 7 elements", lambda: pure_set(7)),
    ("GF(2)^4", lambda: vector_space(2, 4)),
    ("GF(3)^2", lambda: vector_space(3, 2)),
    ("Sym(4)", lambda: symmetric_group(4)),
    ("linear order, 30 elements", lambda: linear_order(30)),
]


def bench(structure, backend, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = enumerate_automorphisms(structure, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, len(res), res.nodes


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = sorted(kernels.BACKENDS)
    print(f"backends available: {', '.join(backends)}")
    print(f"{'case':28} {'backend':9} {'autos':>7} {'nodes':>8} {'seconds':>9}")
    for name, make in CASES:
        s = make()
        times = {}
        for b in backends:
            secs, count, nodes = bench(s, b, args.repeat)
            times[b] = secs
            print(f"{name:28} {b:9} {count:7d} {nodes:8d} {secs:9.4f}")
        if len(times) == 2:
            print(f"{'':28} speedup {times['python'] / max(times['compiled'], 1e-9):.1f}x")


if __name__ == "__main__":
    main()
