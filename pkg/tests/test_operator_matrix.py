import numpy as np
import pytest
from scipy.special import beta

from apxnum.bergman import weights
from apxnum.errors import DomainError
from apxnum.extended import jacobi_singular_values, mp_eigvalsh
from apxnum.operator_matrix import (
    adjoint_kernel_check,
    gram_matrix,
    kernel_gram,
    read_matrix_csv,
    sqrt_weights,
    taylor_matrix,
    write_matrix_csv,
)
from apxnum.quadrature import circle_rule, disk_rule, graded_angles, radial_rule
from apxnum.symbols import affine, lens, mobius, shrink


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.0])
def test_radial_rule_moments(alpha):
    r, w = radial_rule(alpha, 40)
    k = np.arange(12)
    # int |z|^{2k} dA_alpha = w_k
    assert np.allclose((r[None, :] ** (2 * k[:, None])) @ w, weights(12, alpha), rtol=1e-12)


def test_radial_rule_rejects_hardy():
    with pytest.raises(DomainError):
        radial_rule(-1.0, 8)


def test_graded_angles_integrate():
    t, w = graded_angles([0.0, np.pi], 2048)
    assert w.sum() == pytest.approx(1.0, rel=1e-13)
    # |sin t|^{1/2} has cusps at the contacts
    exact = 2 / np.pi * 0.5 * beta(0.75, 0.5)
    assert np.dot(w, np.sqrt(np.abs(np.sin(t)))) == pytest.approx(exact, rel=1e-8)


def test_circle_and_disk_rules():
    assert circle_rule(64).weights.sum() == pytest.approx(1.0)
    rule = disk_rule(1.0, 16, 32)
    assert rule.weights.sum() == pytest.approx(1.0)
    with pytest.raises(DomainError):
        circle_rule(8, radius=1.5)


def test_taylor_matrix_shrink_diagonal():
    M = taylor_matrix(shrink(0.5), 0.0, 10).entries
    assert np.allclose(M, np.diag(0.5 ** np.arange(11)))


def test_taylor_matrix_columns_are_powers():
    phi = affine(0.3, 0.4)
    M = taylor_matrix(phi, -1.0, 6).entries
    # Hardy case: column k holds the coefficients of (0.3 + 0.4z)^k
    assert np.allclose(M[:3, 2], [0.09, 0.24, 0.16])


def test_sqrt_weights_extended():
    a = sqrt_weights(30, 0.5)
    b = sqrt_weights(30, 0.5, np.longdouble)
    assert np.allclose(a, b.astype(float), rtol=1e-13)


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_gram_matches_taylor(alpha):
    phi = affine(0.3, 0.4)
    T = taylor_matrix(phi, alpha, 12).entries
    G = gram_matrix(phi, alpha, 12).entries
    assert np.allclose(G, T.conj().T @ T, atol=1e-9)


def test_kernel_gram_lens():
    S = kernel_gram(lens(0.5), -1.0, n_nodes=512).entries
    lam = np.linalg.eigvalsh(S)[::-1]
    a = np.sqrt(lam[:10])
    assert np.all(np.diff(a) < 0)
    # phi(0) = 0, so the norm on H^2 is exactly 1
    assert a[0] == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(S, S.conj().T)


def test_kernel_gram_rejects_automorphism():
    with pytest.raises(DomainError):
        kernel_gram(mobius(0.3), -1.0, 64)


@pytest.mark.parametrize("phi", [shrink(0.5), affine(0.3, 0.4), lens(0.5)], ids=str)
def test_adjoint_kernel(phi):
    assert adjoint_kernel_check(phi, 0.0, 0.3 + 0.2j, N=128) < 1e-8


def test_matrix_csv_roundtrip(tmp_path, rng):
    M = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    p = tmp_path / "m.csv"
    write_matrix_csv(M, p)
    assert np.array_equal(read_matrix_csv(p), M)


def test_jacobi_matches_svd(rng):
    A = rng.standard_normal((12, 9))
    assert np.allclose(jacobi_singular_values(A).astype(float), np.linalg.svd(A, compute_uv=False), rtol=1e-12)


def test_jacobi_small_values():
    d = np.logspace(0, -25, 8)
    Q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((8, 8)))
    A = (np.diag(d) @ Q).astype(np.longdouble)
    s = jacobi_singular_values(A).astype(float)
    assert np.allclose(s, d, rtol=1e-8)


def test_mp_eigvalsh():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    ev = sorted(float(x) for x in mp_eigvalsh(M.tolist(), 30))
    assert np.allclose(ev, [1.0, 3.0], rtol=1e-25)
