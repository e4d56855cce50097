import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apxnum.errors import DomainError, PreconditionError
from apxnum.radial import RadialSequence
from apxnum.shift_lab import (
    OmegaDomain,
    ShiftModel,
    boue_floor,
    boue_ratio_check,
    carleson_constant,
    hadlac_floor,
    hayman_rect_bounds,
    hoffman_product,
    interpolation_constant_bounds,
    is_log_convex,
    lens_lower_bound,
    logconvexify,
    minoration_check,
    omega_contains,
    omega_from_eps,
    omega_psi,
    poincare_sandwich,
    shift_from_sequence,
    shift_matrix,
    slow_decay_pipeline,
    star_shape_violation,
)
from apxnum.spectra import approx_numbers
from apxnum.symbols import lens


def test_logconvexify_harmonic():
    n = np.arange(1, 6)
    assert np.allclose(logconvexify(1.0 / n), 1.0 / n)


def test_logconvexify_constant():
    d = logconvexify(np.full(10, 0.3))
    assert np.all(np.diff(d) < 0) and is_log_convex(d)


def test_logconvexify_geometric():
    e = 2.0 ** -np.arange(1, 30)
    assert np.allclose(logconvexify(e), e, rtol=1e-14)


def test_logconvexify_rejects_increase():
    with pytest.raises(DomainError):
        logconvexify([0.5, 0.6])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-3, 1.0), min_size=3, max_size=40))
def test_logconvexify_property(vals):
    e = np.sort(np.asarray(vals))[::-1]
    d = logconvexify(e)
    assert is_log_convex(d, rtol=1e-9)
    assert np.all(d >= e)


def test_carleson_constant_examples():
    assert carleson_constant(np.array([0, 0.5]))[0] == pytest.approx(0.5)
    assert carleson_constant(np.array([0.3j]))[0] == 1.0
    u = RadialSequence.from_points(1 - 2.0 ** -np.arange(1, 41))
    delta = carleson_constant(u)[0]
    assert delta == pytest.approx(hoffman_product(0.5, 60), rel=1e-3)
    assert delta >= hadlac_floor(0.5)
    with pytest.raises(DomainError):
        carleson_constant(np.array([0.2, 0.2]))


def test_carleson_constant_gap_form_matches_points(rng):
    r = np.sort(rng.uniform(0.05, 0.95, 12))
    a = carleson_constant(RadialSequence.from_points(r))[1]
    b = carleson_constant(r.astype(complex))[1]
    assert np.allclose(a, b, rtol=1e-10)


def test_interpolation_bounds():
    lo, hi = interpolation_constant_bounds(math.exp(-1), lam=2.0)
    assert lo == pytest.approx(math.e) and hi == pytest.approx(4 * math.e)


def test_hadlac_and_hoffman():
    assert hadlac_floor(0.5) == pytest.approx(math.exp(-math.pi**2), rel=1e-14)
    assert hoffman_product(0.5, 60) == pytest.approx(0.01467, abs=1e-5)
    assert hadlac_floor(1e-9) == pytest.approx(math.exp(-math.pi**2 / 2), rel=1e-8)
    assert hoffman_product(1e-9, 60) == pytest.approx(1.0, abs=1e-8)
    for s in np.linspace(0.05, 0.95, 19):
        p = [hoffman_product(s, t) for t in (5, 20, 80, 320)]
        assert np.all(np.diff(p) <= 0)
        assert p[-1] >= hadlac_floor(s)


def test_boue():
    assert boue_floor(0.5, 0.5) == pytest.approx(math.exp(-2 * math.pi**2 * math.sqrt(2)), rel=1e-12)
    assert boue_floor(0.5, 1 - 1e-9) == pytest.approx(hadlac_floor(0.5), rel=1e-6)
    c = boue_ratio_check(0.5, 0.5)
    assert c.sigma_prime == pytest.approx(1 - 0.25 * math.sqrt(2) * 0.5)
    assert c.ok
    for th in (0.25, 0.75):
        for s in (0.1, 0.5, 0.9):
            assert boue_ratio_check(s, th).ok


def test_shift_from_sequence_example():
    # h(z) = z - 0.25 vanishes at r_1; the weight between 0.5 and 0.75 is |h(0.75)| sqrt(0.4375 / 0.75)
    r = RadialSequence.from_points([0.25, 0.5, 0.75])
    m = shift_from_sequence(r, -1.0, h=lambda z: z - 0.25, h_descriptor="z - 0.25")
    assert m.weights[1] == pytest.approx(0.5 * math.sqrt(0.4375 / 0.75), rel=1e-14)
    assert m.weights[1] == pytest.approx(0.38188, abs=1e-5)


def test_shift_from_sequence_default_h():
    r = RadialSequence.from_points([0.25, 0.5, 0.75])
    m = shift_from_sequence(r, -1.0)
    assert m.weights[0] == pytest.approx(0.25 * math.sqrt(0.75 / 0.9375), rel=1e-14)
    with pytest.raises(PreconditionError):
        shift_from_sequence(r, -1.0, h=lambda z: z - 0.3, h_descriptor="z - 0.3")


def test_constant_ratio_structure():
    g = 0.5 * 0.3 ** np.arange(6)
    r = RadialSequence(g)
    m = shift_from_sequence(r, -1.0)
    # w_n / |h(r_{n+1})| = sqrt((1 - r_{n+1}^2) / (1 - r_n^2))
    h = np.abs(r.points[1:] - r.points[0])
    q = r.one_minus_sq()
    assert np.allclose(m.weights / h, np.sqrt(q[1:] / q[:-1]))


def test_shift_singular_values(rng):
    w = rng.uniform(0.01, 1.0, 30)
    m = ShiftModel(w, -1.0, "", None)
    dense = np.linalg.svd(shift_matrix(m), compute_uv=False)
    assert np.allclose(np.sort(dense)[::-1][:30], m.singular_values(), atol=1e-12)
    assert np.allclose(ShiftModel(np.array([0.5, 0.9, 0.1]), -1.0, "", None).singular_values(), [0.9, 0.5, 0.1])


def test_minoration():
    assert minoration_check([0.5, 0.9, 0.1], [0.1, 0.1, 0.1]).ok
    with pytest.raises(PreconditionError):
        minoration_check([0.5, 0.9, 0.1], [0.5, 0.5, 0.5])


@pytest.mark.parametrize("eps", [
    1.0 / np.log(np.arange(1, 201) + 2),
    2.0 ** -np.arange(1, 201, dtype=float),
    0.5 / np.sqrt(np.arange(1, 201)),
], ids=["log", "geometric", "sqrt"])
def test_pipeline_passes(eps):
    model, rep = slow_decay_pipeline(eps, C0=1.0, M=200)
    assert rep["checks"]["all_pass"]
    assert rep["checks"]["inherited_floor"]
    assert len(rep["table"]) == 200
    assert all(row["a_n"] >= row["floor"] * (1 - 1e-12) for row in rep["table"])


def test_pipeline_geometric_ratios():
    e = 2.0 ** -np.arange(1, 21, dtype=float)
    _, rep = slow_decay_pipeline(e, M=20)
    lg = np.array([row["log10_gap"] for row in rep["table"]])
    # log ratio -2 log(1/eps_n) = -2 n log 2
    assert np.allclose(np.diff(lg), -2 * np.arange(1, 20) * np.log10(2), rtol=1e-10)


def test_pipeline_constant_eps_warns():
    with pytest.warns(UserWarning):
        _, rep = slow_decay_pipeline(np.full(30, 0.4), M=30)
    assert rep["checks"]["all_pass"]


def test_omega_psi():
    n = np.arange(1, 8)
    dom = omega_from_eps(np.exp(-n.astype(float)))
    assert omega_psi(0.0, dom) == pytest.approx(dom.K)
    for k in range(2, 8):
        assert omega_psi(math.exp(k - 1), dom) == pytest.approx(math.exp(k - 1) / k, rel=1e-12)
    assert 0.5 * omega_psi(2.0, dom) <= omega_psi(1.0, dom)
    assert star_shape_violation(dom) <= 1e-12
    assert omega_contains(0.0, dom) and not omega_contains(10j, dom)


def test_omega_rejects_convex():
    with pytest.raises(DomainError):
        OmegaDomain(np.array([1.0, 2.0, 4.0]))


def test_hayman_rect():
    assert hayman_rect_bounds(1, math.e, 1, "upper") == pytest.approx(math.pi * (math.e - 1) / 4 + math.pi / 2)
    assert hayman_rect_bounds(0, 2 * 0.3, 0.3, "lower") == pytest.approx(0.0, abs=1e-15)
    assert hayman_rect_bounds(0.2, 3.0, 0.7, "upper") - hayman_rect_bounds(0.2, 3.0, 0.7, "lower") == pytest.approx(math.pi)
    with pytest.raises(DomainError):
        hayman_rect_bounds(2, 1, 1, "upper")


def test_poincare_sandwich():
    assert poincare_sandwich(0, 0.5) == pytest.approx((1 / 3, 0.5, 2 / 3))
    lo, mid, hi = poincare_sandwich(0.5, 0.5 + 1e-9)
    assert lo == pytest.approx(1.0, abs=1e-8) and mid == pytest.approx(1.0, abs=1e-8)


def test_poincare_sandwich_random(rng):
    pairs = np.sort(rng.uniform(0, 1, (10_000, 2)), axis=1)
    for a, b in pairs:
        if a < b:
            lo, mid, hi = poincare_sandwich(a, b)
            assert lo <= mid <= hi


def test_lens_lower_bound():
    f = lens_lower_bound(0.5, 100)
    assert f.b_theta == pytest.approx(math.pi * math.sqrt(2), rel=1e-14)
    assert f.sigma_used == pytest.approx(1 - math.sqrt(4 * math.pi**2 / 0.5) / 10, rel=1e-12)
    assert f.floor > 0 and f.tuned
    with pytest.raises(DomainError):
        lens_lower_bound(0.5, 10)
    assert not lens_lower_bound(0.5, 10, fallback=True).tuned


def test_lens_floor_below_spectrum():
    s = approx_numbers(lens(0.5), -1.0, 30, N=2048)
    v = s.stable_values()
    for n in range(1, v.size + 1):
        assert lens_lower_bound(0.5, n, fallback=True).floor <= v[n - 1]
