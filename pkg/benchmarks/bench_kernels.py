"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--n 400] [--repeat 5]

The first numba call (compilation) is excluded from the timings.
"""

import argparse
import timeit

import numpy as np

from lcoarea import kernels
from lcoarea._accel import NUMBA_AVAILABLE
from lcoarea.backends import unit_diamond


def inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    coords = np.ascontiguousarray(unit_diamond(1).sample(rng, n))
    le, ll, tau = kernels.minkowski_relations_numpy(coords)
    dist = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(-1))
    adj = np.ascontiguousarray(le & (rng.random((n, n)) < 0.2))
    a, b = np.nonzero(le & ~np.eye(n, dtype=bool))
    k = min(len(a), 2000)
    ps, qs = np.ascontiguousarray(a[:k].astype(np.int64)), np.ascontiguousarray(b[:k].astype(np.int64))
    return {
        "minkowski_relations": (coords,),
        "transitive_closure": (adj,),
        "axiom_triple_scan": (le, ll, tau, dist, 1e-9),
        "diamond_diameters": (le, dist, ps, qs),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    cases = inputs(args.n)
    print(f"n={args.n}  numba available: {NUMBA_AVAILABLE}")
    print(f"{'kernel':<22}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, a in cases.items():
        f_np = getattr(kernels, f"{name}_numpy")
        t_np = min(timeit.repeat(lambda: f_np(*a), number=1, repeat=args.repeat)) * 1e3
        if NUMBA_AVAILABLE:
            f_nb = getattr(kernels, f"{name}_numba")
            f_nb(*a)
            t_nb = min(timeit.repeat(lambda: f_nb(*a), number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<22}{t_np:>12.2f}{t_nb:>12.2f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<22}{t_np:>12.2f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
