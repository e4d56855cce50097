"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a ``@njit`` version and a pure-numpy version with
identical semantics. Set ``APXNUM_NUMBA=0`` in the environment before import
to force the numpy path (useful for debugging and for the benchmark).
"""
import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("APXNUM_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)

__all__ = [
    "USE_NUMBA",
    "cauchy_powers",
    "window_max",
    "pair_products",
    "cauchy_powers_numpy",
    "window_max_numpy",
    "pair_products_numpy",
]


# --------------------------------------------------------------------------
# Powers of a truncated power series: column k holds the coefficients of f^k.


def cauchy_powers_numpy(coeffs, n_powers):
    c = np.asarray(coeffs)
    n = c.shape[0]
    out = np.zeros((n, n_powers), dtype=c.dtype)
    if n_powers == 0:
        return out
    out[0, 0] = 1
    for k in range(1, n_powers):
        out[:, k] = np.convolve(out[:, k - 1], c)[:n]
    return out


def _cauchy_powers_loop(coeffs, n_powers):
    n = coeffs.shape[0]
    # row k holds f^k, so the inner products run over contiguous memory
    rows = np.zeros((n_powers, n), dtype=coeffs.dtype)
    if n_powers == 0:
        return rows.T.copy()
    rows[0, 0] = 1.0
    # first nonzero coefficient bounds the valuation of every power
    v = 0
    while v < n and coeffs[v] == 0:
        v += 1
    for k in range(1, n_powers):
        lo = min(k * v, n)
        prev_lo = (k - 1) * v
        for j in range(lo, n):
            acc = 0.0 * coeffs[0]
            for i in range(v, j - prev_lo + 1):
                acc += coeffs[i] * rows[k - 1, j - i]
            rows[k, j] = acc
    return rows.T.copy()


# --------------------------------------------------------------------------
# Circular sliding window: max total weight of points whose angle lies in an
# arc of given width. Angles must be sorted ascending in [-pi, pi).


def window_max_numpy(angles, weights, width):
    m = angles.shape[0]
    if m == 0:
        return 0.0, 0, 0
    ext_a = np.concatenate([angles, angles + 2 * np.pi])
    ext_w = np.concatenate([weights, weights])
    csum = np.concatenate([[0.0], np.cumsum(ext_w)])
    # window [a_i, a_i + width] for each starting point i < m
    stop = np.searchsorted(ext_a, angles + width, side="right")
    stop = np.minimum(stop, np.arange(m) + m)
    sums = csum[stop] - csum[np.arange(m)]
    i = int(np.argmax(sums))
    return float(sums[i]), i, int(stop[i])


def _window_max_loop(angles, weights, width):
    m = angles.shape[0]
    if m == 0:
        return 0.0, 0, 0
    best = -1.0
    best_i = 0
    best_j = 0
    j = 0
    acc = 0.0
    two_pi = 2.0 * np.pi
    for i in range(m):
        if j < i:
            j = i
            acc = 0.0
        limit = angles[i] + width
        while j < i + m:
            jj = j if j < m else j - m
            aj = angles[jj] if j < m else angles[jj] + two_pi
            if aj > limit:
                break
            acc += weights[jj]
            j += 1
        if acc > best:
            best = acc
            best_i = i
            best_j = j
        acc -= weights[i]
    return best, best_i, best_j


# --------------------------------------------------------------------------
# Products prod_{j != n} rho(z_n, z_j) over a finite point set.


def pair_products_numpy(points):
    z = np.asarray(points, dtype=complex)
    num = z[:, None] - z[None, :]
    den = 1.0 - np.conj(z)[:, None] * z[None, :]
    rho = np.abs(num / den)
    np.fill_diagonal(rho, 1.0)
    return np.exp(np.sum(np.log(rho), axis=1))


def _pair_products_loop(points):
    m = points.shape[0]
    out = np.empty(m)
    for n in range(m):
        s = 0.0
        zn = points[n]
        for j in range(m):
            if j == n:
                continue
            zj = points[j]
            s += np.log(abs((zn - zj) / (1.0 - zn.conjugate() * zj)))
        out[n] = np.exp(s)
    return out


if USE_NUMBA:
    _cauchy_powers_jit = njit(cache=True)(_cauchy_powers_loop)
    _window_max_jit = njit(cache=True)(_window_max_loop)
    _pair_products_jit = njit(cache=True)(_pair_products_loop)


def cauchy_powers(coeffs, n_powers):
    """Coefficient matrix of ``f**0 .. f**(n_powers-1)`` truncated to ``len(coeffs)``.

    Always the numpy path: ``np.convolve`` beats the compiled loop by about 2x
    here (see ``benchmarks/bench_kernels.py``), and it also covers ``longdouble``.
    """
    return cauchy_powers_numpy(np.ascontiguousarray(coeffs), int(n_powers))


def window_max(angles, weights, width):
    """Return ``(best_sum, start, stop)``; the window covers ``start:stop`` (mod len)."""
    a = np.ascontiguousarray(angles, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if USE_NUMBA:
        return _window_max_jit(a, w, float(width))
    return window_max_numpy(a, w, float(width))


def pair_products(points):
    z = np.ascontiguousarray(points, dtype=np.complex128)
    if USE_NUMBA:
        return _pair_products_jit(z)
    return pair_products_numpy(z)
