import math

import numpy as np
import pytest

from apxnum.boundary_bounds import (
    chi_inverse,
    chi_inverse_bisect,
    moment_gram,
    report_json,
    restriction_spectrum,
    seville_chi,
    seville_f,
    seville_floor,
    seville_measure_moments,
    seville_params,
    seville_report,
)
from apxnum.errors import DomainError


def test_params_r08():
    p = seville_params(0.8)
    assert p.rho == pytest.approx(0.5, rel=1e-15)
    assert p.eps == pytest.approx(math.pi / math.log(3), rel=1e-14)
    assert p.s == pytest.approx(math.exp(-p.eps * math.pi / 2), rel=1e-14)
    assert p.s == pytest.approx(0.011199, abs=1e-6)


def test_params_limits():
    s = [seville_params(r).s for r in (0.9, 0.99, 0.999)]
    assert s[0] < s[1] < s[2] < 1
    p = seville_params(1e-4)
    assert p.rho == pytest.approx(5e-5, rel=1e-6) and p.s < 1e-100
    grid = np.linspace(0.05, 0.95, 20)
    sg = [seville_params(r).s for r in grid]
    assert np.all(np.diff(sg) > 0)
    for r in grid:
        rho = seville_params(r).rho
        assert 2 * rho / (1 + rho**2) == pytest.approx(r, abs=1e-12)
    with pytest.raises(DomainError):
        seville_params(1.0)


def test_f_center_and_modulus(rng):
    p = seville_params(0.8)
    assert seville_f(p, p.rho) == pytest.approx(p.s, abs=1e-16)
    x = np.linspace(1e-3, p.r, 50)
    assert np.allclose(np.abs(seville_f(p, x)), p.s, rtol=1e-12)
    z = np.sqrt(rng.uniform(0, 0.9999**2, 10_000)) * np.exp(2j * np.pi * rng.uniform(size=10_000))
    assert np.max(np.abs(seville_f(p, z))) <= 1 + 1e-12
    with pytest.raises(DomainError):
        seville_f(p, 1.0)


def test_chi_winds_once():
    p = seville_params(0.7)
    x = np.linspace(0, p.r, 2001)
    chi = seville_chi(p, x).real
    assert np.all(np.diff(chi) < 0)
    assert chi[0] == pytest.approx(math.pi, abs=1e-12)
    assert chi[-1] == pytest.approx(-math.pi, abs=1e-12)


@pytest.mark.parametrize("theta", [-3.0, -1.0, 0.0, 0.5, 2.9])
def test_chi_inverse(theta):
    p = seville_params(0.8)
    x = chi_inverse(p, theta)
    assert x == pytest.approx(chi_inverse_bisect(p, theta), abs=1e-12)
    assert seville_chi(p, x).real == pytest.approx(theta, abs=1e-10)


def test_moments():
    p = seville_params(0.8)
    m = seville_measure_moments(p, 12)
    assert m[0] == pytest.approx(1.0, rel=1e-14)
    k = np.arange(13)
    assert np.all(m > 0) and np.all(m <= p.r**k * (1 + 1e-14))
    assert np.all(np.diff(m) < 0)


def test_moment_gram_psd():
    G = moment_gram(seville_params(0.8), -1.0, 10)
    ev = np.linalg.eigvalsh(G)
    assert ev.min() > -1e-14 * ev.max()
    assert np.allclose(G, G.T)


def test_floor():
    s = seville_params(0.8).s
    assert seville_floor(s, 3) == pytest.approx(s**3 / math.sqrt(3))
    assert seville_floor(s, 3) == pytest.approx(8.1e-7, rel=0.01)


def test_spectrum_double_above_floor():
    p = seville_params(0.8)
    sp = restriction_spectrum(p, -1.0, N=6, precision="double")
    cert = ~sp.flags
    assert cert[0] and sp.values[0] >= p.s
    floors = np.array(sp.meta["floors"])
    assert np.all(sp.values[cert] >= floors[cert])


def test_spectrum_mp_certified():
    p = seville_params(0.8)
    sp = restriction_spectrum(p, -1.0, N=10, precision="mp")
    assert sp.precision == "mp" and not sp.flags.any()
    assert np.all(sp.values >= np.array(sp.meta["floors"]))
    assert np.all(np.diff(sp.values) < 0)


def test_spectra_dominate():
    a = restriction_spectrum(seville_params(0.9), -1.0, N=6, precision="double")
    b = restriction_spectrum(seville_params(0.5), -1.0, N=6, precision="double")
    both = ~a.flags & ~b.flags
    assert both.sum() >= 3
    assert np.all(a.values[both] >= b.values[both])


def test_report_json():
    rep = seville_report(0.8, -1.0, N=4, precision="double")
    assert [row["n"] for row in rep["rows"]] == [1, 2, 3, 4, 5]
    assert '"params"' in report_json(rep)
