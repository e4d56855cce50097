import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apxnum.errors import DomainError
from apxnum.symbols import (
    affine,
    backward_orbit,
    blaschke_power,
    boundary_contacts,
    bracket,
    composed,
    conjugate_at,
    hyperbolic_d,
    hyperbolic_pair,
    identity,
    lens,
    lens_boundary_gap,
    mobius,
    parse_symbol,
    phi_sharp,
    pseudo_hyperbolic,
    shrink,
)

BUILTINS = [identity(), shrink(0.5), affine(0.3, 0.4), mobius(0.3), lens(0.25), lens(0.5), lens(0.75),
            blaschke_power(0.2, 2), composed([lens(0.5), shrink(0.8)]), conjugate_at(affine(0.3, 0.4), 0.5)]


def test_eval_values():
    assert identity()(0.3) == pytest.approx(0.3)
    assert lens(0.5)(0.6) == pytest.approx(1 / 3, abs=1e-15)
    assert abs(mobius(0.5)(0.5)) < 1e-15


def test_eval_outside_disk():
    with pytest.raises(DomainError):
        shrink(0.5)(1.5)


def test_taylor_closed_forms():
    assert np.allclose(shrink(0.5).taylor(3).coeffs, [0, 0.5, 0, 0])
    assert np.allclose(mobius(0.5).taylor(2).coeffs, [0.5, -0.75, -0.375], atol=1e-15)
    assert lens(0.5).taylor(8).coeffs[1] == pytest.approx(0.5, abs=1e-10)


@pytest.mark.parametrize("phi", BUILTINS, ids=str)
def test_taylor_matches_eval(phi):
    c = phi.taylor(60).coeffs
    z = 0.4 * np.exp(1j * np.linspace(0, 6, 7))
    partial = np.polyval(c[::-1], z)
    assert np.allclose(partial, phi(z), atol=1e-9)


def test_pseudo_hyperbolic_values():
    assert pseudo_hyperbolic(0, 0.3 + 0.4j) == pytest.approx(0.5)
    assert pseudo_hyperbolic(0.5, 0.25) == pytest.approx(2 / 7, rel=1e-14)
    assert hyperbolic_d(0, 0.5) == pytest.approx(0.5 * math.log(3), rel=1e-14)
    p = hyperbolic_pair(0.1, 0.6j)
    assert p.d == pytest.approx(0.5 * math.log((1 + p.rho) / (1 - p.rho)), rel=1e-13)
    with pytest.raises(DomainError):
        pseudo_hyperbolic(1.0, 0.2)


disk_pt = st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)), st.floats(0, 0.95), st.floats(-math.pi, math.pi))


@settings(max_examples=200, deadline=None)
@given(disk_pt, disk_pt, disk_pt)
def test_pseudo_hyperbolic_triangle(a, b, c):
    ab, bc, ac = pseudo_hyperbolic(a, b), pseudo_hyperbolic(b, c), pseudo_hyperbolic(a, c)
    assert ab == pytest.approx(pseudo_hyperbolic(b, a), abs=1e-14)
    assert ac <= (ab + bc) / (1 + ab * bc) + 1e-12


def test_phi_sharp_values():
    assert phi_sharp(mobius(0.3), 0.2 - 0.5j) == pytest.approx(1.0, abs=1e-13)
    assert phi_sharp(lens(0.5), 0) == pytest.approx(0.5, abs=1e-13)
    assert phi_sharp(shrink(0.5), 0) == pytest.approx(0.5)


@pytest.mark.parametrize("phi", BUILTINS, ids=str)
def test_schwarz_pick(phi, rng):
    z = np.sqrt(rng.uniform(0, 0.998, 2000)) * np.exp(2j * np.pi * rng.uniform(size=2000))
    assert np.max(phi_sharp(phi, z)) <= 1 + 1e-12


def test_bracket_values():
    for theta in (0.25, 0.5, 0.75):
        assert bracket(lens(theta)).value == pytest.approx(theta, abs=1e-3)
    assert bracket(identity()).value == pytest.approx(1.0)
    assert 0.40 < bracket(affine(0.3, 0.4)).value < 0.46


def test_bracket_conformal_invariance():
    phi = affine(0.3, 0.4)
    twisted = composed([mobius(0.2j), phi, mobius(-0.3)])
    assert bracket(twisted).value == pytest.approx(bracket(phi).value, abs=2e-3)


def test_conjugate_at():
    psi = conjugate_at(identity(), 0.5)
    assert abs(psi(0)) < 1e-12 and abs(psi.derivative(0)) == pytest.approx(1.0)
    psi = conjugate_at(shrink(0.5), 0)
    assert np.allclose(psi(np.array([0.1, 0.3j])), shrink(0.5)(np.array([0.1, 0.3j])))
    psi = conjugate_at(affine(0.3, 0.4), 0.5)
    assert abs(psi.derivative(0)) == pytest.approx(0.4, rel=1e-10)


def test_lens_boundary_gap():
    assert lens_boundary_gap(0.5, 0.6) == pytest.approx(2 / 3)
    assert lens_boundary_gap(0.5, 1e-12) == pytest.approx(1.0, abs=1e-9)
    assert lens_boundary_gap(0.5, 0.96) == pytest.approx(0.25, rel=1e-14)
    r = np.linspace(0.05, 0.95, 9)
    assert np.allclose(lens_boundary_gap(0.3, r), 1 - lens(0.3)(r).real, atol=1e-14)


def test_backward_orbit():
    assert np.allclose(backward_orbit(0.5, 1 / 3, 2).points, [1 / 3, 0.6])
    r = backward_orbit(0.5, 0.5, 5).points
    assert np.all(np.diff(r) > 0) and r[-1] < 1
    r = backward_orbit(0.3, 0.2, 3).points
    assert abs(lens(0.3)(r[1]).real - r[0]) < 1e-12


def test_boundary_contacts():
    assert np.allclose(boundary_contacts(lens(0.5)).angles, [0, np.pi])
    assert boundary_contacts(mobius(0.3)).inner_like
    assert boundary_contacts(shrink(0.5)).angles.size == 0
    c = boundary_contacts(affine(0.5, 0.5)).angles
    assert c.size == 1 and abs(c[0]) < 1e-4


@pytest.mark.parametrize("text", ["identity", "shrink:0.5", "affine:0.3,0.4", "mobius:0.5", "lens:0.25",
                                  "blaschke:0.2,3", "compose:[lens:0.5;shrink:0.5]", "conj:lens:0.5@0.2"])
def test_parse_roundtrip(text):
    phi = parse_symbol(text)
    assert str(phi) == text
    assert parse_symbol(str(phi)) == phi


@pytest.mark.parametrize("text", ["lens:1.5", "shrink:2", "bogus:1", "affine:0.1", "compose:lens:0.5", "blaschke:0.2,1.5"])
def test_parse_rejects(text):
    with pytest.raises(DomainError):
        parse_symbol(text)
