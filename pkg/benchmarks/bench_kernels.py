"""Timing comparison between the compiled kernel core and the pure
Python mirror. Both modules are imported directly, side by side, so one
process measures the exact same seeded workload on each.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

The two backends are required to agree bit for bit (the test suite
enforces that); this script only reports how much time the compiled
core saves.
"""

import sys
import time

import numpy as np

try:
    from geodepth import _kernels as fast
except ImportError:
    print("compiled core is not built; run: python3 setup.py build_ext --inplace")
    sys.exit(1)
from geodepth import _kernels_py as pure


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _row(label, work, pure_fn, fast_fn):
    tp = _time(pure_fn)
    tf = _time(fast_fn)
    ratio = tp / tf if tf > 0 else float("inf")
    print(f"{label:<28} {work:>12} {tp * 1e3:>10.2f} {tf * 1e3:>10.2f} {ratio:>8.1f}x")


def main():
    gen = np.random.default_rng(0)

    n_e, k_e = 400, 8
    Xe = gen.standard_normal((n_e, k_e))
    Qe = gen.standard_normal((32, k_e))

    n_s = 250
    Xs = gen.standard_normal((n_s, 4))
    Xs /= np.linalg.norm(Xs, axis=1)[:, None]
    Qs = gen.standard_normal((16, 4))
    Qs /= np.linalg.norm(Qs, axis=1)[:, None]

    n_t = 250
    Xt = gen.uniform(0.0, 2.0 * np.pi, (n_t, 3))
    Qt = gen.uniform(0.0, 2.0 * np.pi, (16, 3))

    n_p, k_p = 60, 3
    mats = []
    for _ in range(n_p + 8):
        Z = gen.standard_normal((6, k_p))
        M = Z.T @ Z
        mats.append((0.5 * (M + M.T)).reshape(-1))
    Xp = np.array(mats[:n_p])
    Qp = np.array(mats[n_p:])

    sym = []
    for _ in range(2000):
        Z = gen.standard_normal((5, 5))
        sym.append(0.5 * (Z + Z.T))
    sym = np.array(sym)

    print(f"{'kernel':<28} {'work':>12} {'pure ms':>10} {'fast ms':>10} {'speedup':>9}")
    print("-" * 73)
    _row(
        "depth_counts euclid",
        f"{n_e * (n_e - 1) // 2}x32",
        lambda: pure.depth_counts(pure.KIND_EUCLID, Xe, Qe),
        lambda: fast.depth_counts(pure.KIND_EUCLID, Xe, Qe),
    )
    _row(
        "depth_counts sphere",
        f"{n_s * (n_s - 1) // 2}x16",
        lambda: pure.depth_counts(pure.KIND_SPHERE, Xs, Qs),
        lambda: fast.depth_counts(pure.KIND_SPHERE, Xs, Qs),
    )
    _row(
        "depth_counts torus",
        f"{n_t * (n_t - 1) // 2}x16",
        lambda: pure.depth_counts(pure.KIND_TORUS, Xt, Qt),
        lambda: fast.depth_counts(pure.KIND_TORUS, Xt, Qt),
    )
    _row(
        "depth_counts spd",
        f"{n_p * (n_p - 1) // 2}x8",
        lambda: pure.depth_counts(pure.KIND_SPD, Xp, Qp),
        lambda: fast.depth_counts(pure.KIND_SPD, Xp, Qp),
    )
    _row(
        "jacobi_eig 5x5",
        "2000 mats",
        lambda: [pure.jacobi_eig(m, True) for m in sym],
        lambda: [fast.jacobi_eig(m, True) for m in sym],
    )
    _row(
        "spd_distance 3x3",
        "1000 pairs",
        lambda: [pure.spd_distance(Xp[i % n_p].reshape(k_p, k_p), Xp[(i * 7 + 1) % n_p].reshape(k_p, k_p)) for i in range(1000)],
        lambda: [fast.spd_distance(Xp[i % n_p].reshape(k_p, k_p), Xp[(i * 7 + 1) % n_p].reshape(k_p, k_p)) for i in range(1000)],
    )


if __name__ == "__main__":
    main()
