"""Wall time of the structured path against the dense oracle.

    python benchmarks/bench_paths.py [--max-n 48] [--repeat 3]

For each square lattice the script times the entropy of the centered
(n/2) x (n/2) block by both routes and reports their agreement.
"""

import argparse
import time

from harmchains import REFERENCE_MODEL, BlockSpec, Geometry
from harmchains.correlations import _ground_state
from harmchains.entropy import block_entropy
from harmchains.oracle import block_indices, dense_entropy, dense_ground_state


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def structured(g, block):
    _ground_state.cache_clear()  # time the inverses too
    return block_entropy(REFERENCE_MODEL, g, block).S


def dense(g, block):
    dc = dense_ground_state(REFERENCE_MODEL, g, cap=10 ** 5)
    return dense_entropy(dc, block_indices(g, block))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-n", type=int, default=48)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"{'n_x=n_y':>8} {'N':>6} {'structured [ms]':>16} {'dense [ms]':>12} {'speedup':>9} {'|ΔS|':>9}")
    for n in [n for n in (4, 8, 16, 32, 48, 64) if n <= args.max_n]:
        g = Geometry(n, n)
        block = BlockSpec(n // 2, n // 2)
        t_s, s_s = best_of(lambda: structured(g, block), args.repeat)
        t_d, s_d = best_of(lambda: dense(g, block), args.repeat)
        print(f"{n:>8} {g.size:>6} {1e3 * t_s:>16.3f} {1e3 * t_d:>12.3f} {t_d / t_s:>9.1f} {abs(s_s - s_d):>9.1e}")

    print("\nstructured path only, n_y = 10^6:")
    for n_x in (256, 1024, 2048):
        g = Geometry(n_x, 10 ** 6)
        t, s = best_of(lambda: structured(g, BlockSpec(32, 1000)), 1)
        print(f"  n_x={n_x:>5}  block 32x1000  S={s:.6f}  {1e3 * t:.1f} ms")


if __name__ == "__main__":
    main()
