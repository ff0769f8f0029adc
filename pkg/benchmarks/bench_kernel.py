"""Time the compiled and pure-Python cover kernels on the same inputs.

    python benchmarks/bench_kernel.py [--repeat N]
"""
import argparse
import time

import numpy as np

from locallattice.cover import available_backends, extend_cover, seed_map
from locallattice.families import build_strange, build_torus
from locallattice.lattice import build_quotient, translation_group

CASES = [
    ("torus 8x8, R=36", lambda: build_torus(8, 8, 0), 2, 36),
    ("strange 5x7, R=60", lambda: build_strange(5, 7), 2, 60),
    ("3-torus 6^3, R=12", lambda: build_quotient(translation_group([(6, 0, 0), (0, 6, 0), (0, 0, 6)])).graph, 3, 12),
    ("3-torus 9^3, R=20", lambda: build_quotient(translation_group([(9, 0, 0), (0, 9, 0), (0, 0, 9)])).graph, 3, 20),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the python backend is available")
    print(f"{'case':<22}{'cells':>10}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, make, d, R in CASES:
        g = make()
        seed = seed_map(g, 0, d)
        row = {}
        windows = []
        for b in backends:
            row[b], pc = best_of(lambda: extend_cover(g, seed, R=R, backend=b), args.repeat)
            windows.append(pc.window)
        assert all(np.array_equal(windows[0], w) for w in windows[1:]), "backends disagree"
        cells = (2 * R + 3) ** d
        speed = f"{row['python'] / row['compiled']:.1f}x" if "compiled" in row else "-"
        print(f"{name:<22}{cells:>10}" + "".join(f"{row[b]:>11.3f}s" for b in backends) + f"{speed:>10}")


if __name__ == "__main__":
    main()
