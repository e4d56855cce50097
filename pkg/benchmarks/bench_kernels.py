"""Compare the compiled and pure-numpy paths of the hot kernels.

Run ``python benchmarks/bench_kernels.py``. Each kernel is timed on the same
inputs through both implementations (best of ``--repeat`` runs, after one
warm-up call that also triggers compilation) and the outputs are checked
for agreement.
"""
import argparse
import time

import numpy as np

from apxnum import _kernels as K


def _best(fn, repeat):
    fn()  # warm-up / compilation
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    # coefficients of a self-map of the disk (sum of moduli below 1) keep the powers bounded
    c = rng.standard_normal(257) * 0.9 ** np.arange(257)
    c *= 0.95 / np.sum(np.abs(c))
    yield "cauchy_powers N=256", (c, 257), K.cauchy_powers_numpy, getattr(K, "_cauchy_powers_jit", None)
    n = 200_000
    ang = np.sort(rng.uniform(-np.pi, np.pi, n))
    w = rng.uniform(0.5, 2.0, n)
    yield "window_max n=2e5", (ang, w, 0.05), K.window_max_numpy, getattr(K, "_window_max_jit", None)
    z = 1 - np.geomspace(0.5, 1e-12, 1500) + 0j
    yield "pair_products n=1500", (z,), K.pair_products_numpy, getattr(K, "_pair_products_jit", None)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print(f"numba enabled: {K.USE_NUMBA}")
    print(f"{'kernel':24s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'rel diff':>10s}")
    for name, inp, f_np, f_jit in cases(rng):
        t_np = _best(lambda: f_np(*inp), args.repeat)
        if f_jit is None:
            print(f"{name:24s} {1e3 * t_np:11.3f} {'n/a':>11s}")
            continue
        t_jit = _best(lambda: f_jit(*inp), args.repeat)
        a, b = f_np(*inp), f_jit(*inp)
        diff = max(abs(np.asarray(x, dtype=complex) - np.asarray(y, dtype=complex)).max()
                   / max(abs(np.asarray(x, dtype=complex)).max(), 1e-300)
                   for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)))
        print(f"{name:24s} {1e3 * t_np:11.3f} {1e3 * t_jit:11.3f} {t_np / t_jit:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
