import io
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from apxnum.carleson import (
    CarlesonProfile,
    embedding_norm_bounds,
    imprecise_bound,
    imprecise_gamma,
    nevanlinna,
    nevanlinna_identity,
    profile_slope,
    pushforward_profile,
    schatten_threshold,
    supper_bound,
    ternary_upper_bound,
    window_contains,
)
from apxnum.errors import DomainError
from apxnum.symbols import identity, lens, shrink


def test_window_contains():
    h = 0.05
    assert window_contains(0.99, 0.0, h)
    assert not window_contains(0, 1.0, h)
    assert not window_contains(0.99 * np.exp(1j * np.pi * h * 1.5), 0.0, h)
    assert window_contains(np.exp(1j * (np.pi - 0.01)), -np.pi, h)
    with pytest.raises(DomainError):
        window_contains(0.5, 0.0, 1.5)


def test_shrink_profile_vanishes():
    p = pushforward_profile(shrink(0.5), -1.0, h_grid=[0.4, 0.1, 0.01], samples=20000, seed=1)
    assert np.all(p.rho_hat == 0)
    lo, hi = embedding_norm_bounds(p)
    assert lo == 0 and np.isfinite(hi)


def test_identity_profile_is_arc_length():
    p = pushforward_profile(identity(), -1.0, samples=200000, seed=3)
    # the sup over ~1/h windows of binomial counts sits above h by an extreme-value margin
    margin = (np.sqrt(2 * np.log(2 / p.h_grid)) + 1) * p.stderr
    assert np.all(p.rho_hat >= p.h_grid - 3 * p.stderr)
    assert np.all(p.rho_hat <= p.h_grid + margin)


def test_lens_profile_slope():
    p = pushforward_profile(lens(0.5), -1.0, samples=200000, seed=3)
    fit = profile_slope(p)
    assert fit.slope == pytest.approx(2.0, rel=0.1)
    assert np.all(p.rho_hat <= 1.0)
    assert np.all(np.diff(p.rho_hat) <= 3 * p.stderr[1:])
    assert np.isfinite(embedding_norm_bounds(p)[1])


def test_profile_reproducible():
    a = pushforward_profile(lens(0.5), -1.0, samples=50000, seed=11)
    b = pushforward_profile(lens(0.5), -1.0, samples=50000, seed=11)
    c = pushforward_profile(lens(0.5), -1.0, samples=50000, seed=12)
    assert np.array_equal(a.rho_hat, b.rho_hat)
    assert not np.array_equal(a.rho_hat, c.rho_hat)


def test_profile_csv():
    p = CarlesonProfile(np.array([0.1, 0.01]), np.array([0.1, 0.01]), np.zeros(2), 10, 0)
    buf = io.StringIO()
    p.to_csv(buf)
    assert buf.getvalue().splitlines() == ["h,rho_hat,stderr", "0.1,0.1,0.0", "0.01,0.01,0.0"]


def test_slope_needs_points():
    p = CarlesonProfile(np.array([0.1, 0.01]), np.array([0.1, 0.0]), np.zeros(2), 10, 0)
    with pytest.raises(DomainError):
        profile_slope(p)


def test_embedding_shape_exact():
    h = np.geomspace(0.1, 0.001, 5)
    p = CarlesonProfile(h, h ** 1.5, np.zeros(5), 10, 0, alpha=-0.5)
    assert embedding_norm_bounds(p) == pytest.approx((1.0, 1.0))


def _ternary_oracle(n, f):
    return minimize_scalar(lambda h: (1 - h) ** n + f(h), bounds=(1e-9, 0.5), method="bounded",
                           options={"xatol": 1e-12}).fun


def test_ternary_h_squared():
    r = ternary_upper_bound(100, -1.0, lambda h: h**2)
    assert r.value == pytest.approx(0.217, abs=0.005)
    assert r.value == pytest.approx(_ternary_oracle(100, math.sqrt), rel=1e-6)
    assert not r.boundary


def test_ternary_h_cubed():
    # minimizer of (1-h)^100 + h solves 100 (1-h)^99 = 1
    h = 1 - 100 ** (-1 / 99)
    exact = (1 - h) ** 100 + h
    assert ternary_upper_bound(100, -1.0, lambda h: h**3).value == pytest.approx(exact, rel=1e-6)


def test_ternary_monotone_in_n():
    vals = [ternary_upper_bound(n, -1.0, lambda h: h**2).value for n in (10, 50, 100, 500)]
    assert np.all(np.diff(vals) <= 1e-12)


def test_supper_bound():
    assert supper_bound(8, -1.0, lambda h: h**2) == pytest.approx(math.exp(-2), abs=1e-4)
    for n, alpha in [(5, 0.0), (7, 1.0)]:
        assert supper_bound(n, alpha, lambda h: h) == pytest.approx(
            math.exp(-0.5) * n ** ((alpha + 1) / 2), rel=1e-8)
    assert supper_bound(2, 0.0, lambda h: h**2 / 4) == pytest.approx(math.sqrt(2) * math.exp(-2), rel=1e-8)


def test_imprecise():
    assert imprecise_gamma(-1.0, 3.0) == 1.0
    assert imprecise_bound(100, -1.0, 3.0) == pytest.approx(math.log(100) / 100)
    assert imprecise_gamma(0.0, 2.0) == 1.0 and schatten_threshold(0.0, 2.0) == 1.0
    assert imprecise_bound(math.e, 0.5, 2.0) == pytest.approx(math.exp(-imprecise_gamma(0.5, 2.0)))
    with pytest.raises(DomainError):
        imprecise_bound(10, 0.0, 1.0)


def test_schatten_threshold_formula():
    for alpha, b in [(-1.0, 3.0), (0.5, 1.5), (2.0, 4.0)]:
        assert schatten_threshold(alpha, b) == pytest.approx(2 / ((b - 1) * (alpha + 2)))


def test_nevanlinna_values():
    assert nevanlinna(shrink(0.5), 0.25, -1.0) == pytest.approx(math.log(2))
    assert nevanlinna(lens(0.5), 1 / 3, -1.0) == pytest.approx(math.log(1 / 0.6), rel=1e-12)
    assert nevanlinna(lens(0.5), 1 / 3, 1.0) == pytest.approx(math.log(1 / 0.6) ** 3, rel=1e-12)
    with pytest.raises(DomainError):
        nevanlinna(shrink(0.5), 0.75, -1.0)


@pytest.mark.parametrize("w", [1 / 3, 0.2 + 0.1j, -0.5])
def test_nevanlinna_integral_identity(w):
    alpha = 0.5
    z = abs(complex(lens(0.5).inverse(w)))
    f = lambda r: max(0.0, math.log(r / z)) * math.log(1 / r) ** alpha / r
    direct = (alpha + 2) * (alpha + 1) * quad(f, z, 1, limit=200)[0]
    assert direct == pytest.approx(nevanlinna(lens(0.5), w, alpha), rel=1e-2)
    assert nevanlinna_identity(lens(0.5), w, alpha) == pytest.approx(nevanlinna(lens(0.5), w, alpha), rel=1e-2)
