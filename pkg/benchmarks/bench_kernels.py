"""Time the numba kernels against their pure-numpy fallbacks.

Run ``python3 benchmarks/bench_kernels.py [--repeat R]``. Numba timings
exclude compilation (each kernel is called once before timing). Outputs are
compared as well, so a speedup never hides a disagreement.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from chebsys._jit import NUMBA_KERNELS, NUMPY_KERNELS


def cases(rng):
    ts = np.sort(rng.uniform(0.1, 0.9, 20000))
    ds = rng.integers(0, 3, ts.size).astype(np.int64)
    s = np.linspace(0.2, 0.8, 8)
    taus = np.sort(rng.uniform(0.1, 0.9, 12))
    m = 32
    modes = np.arange(-m, m + 1).astype(np.int64)
    coef = rng.normal(size=(2 * m + 1) * 4)
    rs = rng.uniform(0, 1, 4000)
    th = rng.uniform(0, 2 * np.pi, 4000)
    v = rng.normal(size=200000)
    return {
        "monomial": (ts, ds, np.zeros(8)),
        "muntz": (ts, ds, np.linspace(0.5, 4.0, 8)),
        "cauchy": (ts, ds, s),
        "gauss": (ts, ds, s),
        "green_unit": (ts, np.minimum(ds, 1), s),
        "sign_changes": (v,),
        "opitz_monomial": (taus, 12),
        "opitz_cauchy": (taus, np.linspace(1.0, 12.0, 12)),
        "polar_field": (coef, 0.5 * coef, modes, 4, rs, th, 1),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, a in cases(rng).items():
        fast, slow = NUMBA_KERNELS[name], NUMPY_KERNELS[name]
        x, y = fast(*a), slow(*a)  # warm-up / compile
        diff = float(np.max(np.abs(np.asarray(x, float) - np.asarray(y, float)))) if np.size(x) else 0.0
        t_np = min(timeit.repeat(lambda: slow(*a), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: fast(*a), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<16}{t_np:>12.3f}{t_nb:>12.3f}{t_np / t_nb:>10.1f}{diff:>14.2e}")


if __name__ == "__main__":
    main()
