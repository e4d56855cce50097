import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from apxnum import _kernels as K

needs_numba = pytest.mark.skipif(not K.USE_NUMBA, reason="numba path disabled")


def _series(rng, n):
    c = rng.standard_normal(n) * 0.8 ** np.arange(n)
    return c * 0.9 / np.sum(np.abs(c))


@needs_numba
@pytest.mark.parametrize("complex_", [False, True])
def test_cauchy_powers_paths_agree(rng, complex_):
    c = _series(rng, 40)
    if complex_:
        c = c + 1j * _series(rng, 40)
    a = K.cauchy_powers_numpy(c, 40)
    b = K._cauchy_powers_jit(c, 40)
    assert np.max(np.abs(a - b)) <= 1e-15


def test_cauchy_powers_small_case():
    P = K.cauchy_powers(np.array([0.0, 0.5, 0.25, 0.0]), 4)
    expected = np.array([[1, 0, 0, 0], [0, 0.5, 0, 0], [0, 0.25, 0.25, 0], [0, 0, 0.25, 0.125]])
    assert np.array_equal(P, expected)


def test_cauchy_powers_longdouble():
    c = np.array([0.1, 0.5, 0.2], dtype=np.longdouble)
    P = K.cauchy_powers(c, 3)
    assert P.dtype == np.longdouble
    assert P[2, 2] == pytest.approx(2 * 0.1 * 0.2 + 0.25)


@needs_numba
def test_window_max_paths_agree(rng):
    ang = np.sort(rng.uniform(-np.pi, np.pi, 5000))
    w = rng.uniform(0, 2, 5000)
    for width in (0.001, 0.05, 1.0, 6.0):
        a = K.window_max_numpy(ang, w, width)
        b = K._window_max_jit(ang, w, width)
        assert a[0] == pytest.approx(b[0], rel=1e-12)


def test_window_max_brute_force(rng):
    ang = np.sort(rng.uniform(-np.pi, np.pi, 300))
    w = rng.uniform(0, 1, 300)
    width = 0.3
    best, _, _ = K.window_max(ang, w, width)
    brute = 0.0
    for s in ang:
        d = np.mod(ang - s, 2 * np.pi)
        brute = max(brute, w[d <= width].sum())
    assert best == pytest.approx(brute, rel=1e-12)


@needs_numba
def test_pair_products_paths_agree(rng):
    z = 0.9 * np.sqrt(rng.uniform(size=50)) * np.exp(2j * np.pi * rng.uniform(size=50))
    assert np.allclose(K.pair_products_numpy(z), K._pair_products_jit(z), rtol=1e-12)


def test_pair_products_two_points():
    assert np.allclose(K.pair_products(np.array([0.0, 0.5 + 0j])), [0.5, 0.5])


def test_env_flag_disables_numba():
    code = "from apxnum import _kernels as K; print(K.USE_NUMBA)"
    env = dict(os.environ, APXNUM_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
