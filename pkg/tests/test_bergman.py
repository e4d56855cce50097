import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apxnum.bergman import (
    BergmanParams,
    CoeffSeries,
    divide_by_zn,
    inner,
    kernel_coeffs,
    kernel_eval,
    kernel_norm_sq,
    kernel_tail_bound,
    norm,
    tail_quotient_bound,
    weight,
    weights,
)
from apxnum.errors import DegenerateInputError, DomainError, PreconditionError


@pytest.mark.parametrize("k, alpha, expected", [(5, -1, 1.0), (2, 0, 1 / 3), (0, 7, 1.0), (3, 0, 0.25)])
def test_weight_values(k, alpha, expected):
    assert weight(k, alpha) == pytest.approx(expected, rel=1e-14)


def test_weight_closed_form_alpha_one():
    # k! Gamma(3) / Gamma(k+3) = 2 / ((k+1)(k+2))
    k = np.arange(20)
    assert np.allclose(weights(20, 1.0), 2.0 / ((k + 1) * (k + 2)), rtol=1e-13)


def test_alpha_rejected():
    with pytest.raises(DomainError):
        BergmanParams(-1.5)
    with pytest.raises(DomainError):
        weights(4, float("nan"))


@pytest.mark.parametrize("coeffs, alpha, expected", [
    ([1, 0, 0], 0.0, 1.0), ([1, 0, 0], 3.0, 1.0), ([0, 1], 0.0, math.sqrt(0.5)), ([0, 1], -1.0, 1.0)])
def test_norm_values(coeffs, alpha, expected):
    assert norm(CoeffSeries(coeffs, alpha)) == pytest.approx(expected, rel=1e-14)


def test_inner_alpha_mismatch():
    with pytest.raises(DomainError):
        inner(CoeffSeries([1], 0.0), CoeffSeries([1], -1.0))


@pytest.mark.parametrize("a, alpha, expected", [(0, 0.0, 1.0), (0.5, -1.0, 4 / 3), (0.5, 0.0, 16 / 9)])
def test_kernel_norm_sq(a, alpha, expected):
    assert kernel_norm_sq(a, alpha) == pytest.approx(expected, rel=1e-14)


def test_kernel_outside_disk():
    with pytest.raises(DomainError):
        kernel_norm_sq(1.0, 0.0)


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 1.5])
def test_kernel_reproduces(alpha, rng):
    a = 0.4 * np.exp(0.7j)
    K = kernel_coeffs(a, alpha, 200)
    f = CoeffSeries(rng.standard_normal(8) + 1j * rng.standard_normal(8), alpha)
    # <f, K_a> = f(a)
    assert inner(f, K) == pytest.approx(f(a), rel=1e-12)
    assert norm(K) ** 2 == pytest.approx(kernel_norm_sq(a, alpha), rel=1e-12)
    assert kernel_eval(a, a, alpha) == pytest.approx(kernel_norm_sq(a, alpha), rel=1e-14)


def test_kernel_tail_bound_dominates():
    a, z, alpha, N = 0.6, 0.7, 0.5, 30
    full = kernel_eval(a, z, alpha)
    part = kernel_coeffs(a, alpha, N)(z)
    assert abs(full - part) <= kernel_tail_bound(a, z, alpha, N)


@pytest.mark.parametrize("n, alpha, expected", [(1, -1.0, 1.0), (3, 0.0, math.exp(11 / 6)), (2, 1.0, math.exp(3))])
def test_tail_quotient_bound(n, alpha, expected):
    assert tail_quotient_bound(n, alpha) == pytest.approx(expected, rel=1e-13)


def test_divide_examples():
    r = divide_by_zn(CoeffSeries([0, 0, 1], -1.0), 2)
    assert np.allclose(r.quotient.coeffs, [1]) and r.ratio == pytest.approx(1.0)
    r = divide_by_zn(CoeffSeries([0, 0, 0, 1], 0.0), 3)
    assert r.ratio == pytest.approx(2.0, rel=1e-14)


def test_divide_errors():
    with pytest.raises(PreconditionError):
        divide_by_zn(CoeffSeries([0, 1, 1], 0.0), 2)
    with pytest.raises(DegenerateInputError):
        divide_by_zn(CoeffSeries([0, 0, 0], 0.0), 2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30), st.integers(1, 6), st.floats(-1.0, 4.0))
def test_divide_ratio_bounded(tail, n, alpha):
    f = CoeffSeries(np.concatenate([np.zeros(n), tail]), alpha)
    if norm(f) == 0:
        return
    r = divide_by_zn(f, n)
    assert r.ratio <= r.bound * (1 + 1e-12)
