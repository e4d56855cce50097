"""Finite matrix realizations of a composition operator ``C_phi``.

Three constructions are provided:

* ``taylor_matrix``: the (N+1)x(N+1) block of ``C_phi`` in the orthonormal
  monomial basis ``e_k = z^k / sqrt(w_k)``, from powers of the Taylor series.
* ``gram_matrix``: ``G_jk = <C_phi e_j, C_phi e_k>`` by quadrature of the
  norm integral; eigenvalues of ``G`` are squared singular values.
* ``kernel_gram``: a Nystrom discretization that never expands ``phi`` in
  monomials. With quadrature nodes ``zeta_i`` and weights ``omega_i`` the
  vectors ``sqrt(omega_i) C_phi^* K_{zeta_i} = sqrt(omega_i) K_{phi(zeta_i)}``
  have Gram matrix ``sqrt(omega_i omega_j) K(phi(zeta_i), phi(zeta_j))``, whose
  eigenvalues converge to the squared approximation numbers. This is the
  method of choice for symbols touching the unit circle, whose Taylor
  coefficients decay slowly.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import bergman
from ._kernels import cauchy_powers
from .errors import DomainError, NumericalError
from .quadrature import Rule, measure_rule
from .symbols import SchurSymbol, boundary_contacts

BOUNDARY_RADIUS = 1.0 - 1e-6


@dataclass
class OperatorMatrix:
    entries: np.ndarray
    alpha: float
    trunc_degree: int
    method: str
    symbol_descriptor: str
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.entries.shape

    def to_csv(self, path):
        write_matrix_csv(self.entries, path)


def sqrt_weights(n: int, alpha: float, dtype=np.float64) -> np.ndarray:
    """``sqrt(w_k)`` for ``k < n``; extended dtypes use the exact product ``prod j/(j+1+alpha)``."""
    alpha = bergman.check_alpha(alpha)
    if np.dtype(dtype) in (np.dtype(np.longdouble), np.dtype(np.clongdouble)):
        j = np.arange(1, n, dtype=np.longdouble)
        w = np.concatenate([[np.longdouble(1)], np.cumprod(j / (j + 1 + np.longdouble(alpha)))])
        return np.sqrt(w)
    return np.exp(0.5 * bergman.log_weights(n, alpha))


def taylor_matrix(phi: SchurSymbol, alpha: float, N: int, extended: bool = False) -> OperatorMatrix:
    """Entry ``(j, k)`` is ``c_{j,k} sqrt(w_j / w_k)`` with ``c_{j,k}`` the j-th coefficient of ``phi^k``."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    N = int(N)
    c = phi.taylor(N, extended=extended).coeffs
    P = cauchy_powers(c, N + 1)
    sw = sqrt_weights(N + 1, alpha, np.longdouble if extended else np.float64)
    M = P * sw[:, None] / sw[None, :]
    return OperatorMatrix(M, float(alpha), N, "taylor", phi.descriptor, {"extended": extended})


def _monomial_block(w: np.ndarray, sqw: np.ndarray, inv_sw: np.ndarray) -> np.ndarray:
    """Rows ``sqrt(omega_i) w_i^k / sqrt(w_k)`` for the nodes of one quadrature block."""
    n = inv_sw.size
    V = np.empty((w.size, n), dtype=complex)
    V[:, 0] = 1.0
    for k in range(1, n):
        V[:, k] = V[:, k - 1] * w
    return V * sqw[:, None] * inv_sw[None, :]


def _gram_from_rule(phi, rule: Rule, alpha: float, N: int, block: int = 8192) -> np.ndarray:
    inv_sw = 1.0 / sqrt_weights(N + 1, alpha)
    G = np.zeros((N + 1, N + 1), dtype=complex)
    w_all = phi._eval(rule.nodes)
    sq_all = np.sqrt(rule.weights)
    # fixed block order keeps the summation deterministic
    for s in range(0, rule.nodes.size, block):
        E = _monomial_block(w_all[s : s + block], sq_all[s : s + block], inv_sw)
        G += E.conj().T @ E
    return 0.5 * (G + G.conj().T)


def _rule_for(phi, alpha, n_radial, n_angular, radius):
    contacts = boundary_contacts(phi)
    angles = contacts.angles if not contacts.inner_like else ()
    alpha = bergman.check_alpha(alpha)
    if alpha == -1:
        from .quadrature import circle_rule

        return circle_rule(n_angular, angles, radius)
    from .quadrature import disk_rule

    return disk_rule(alpha, n_radial, n_angular, angles)


def gram_matrix(phi: SchurSymbol, alpha: float, N: int, n_radial: int = 256, n_angular: int = 1024,
                radius: float = BOUNDARY_RADIUS, tol: float | None = 1e-8) -> OperatorMatrix:
    """Monomial Gram matrix ``<C_phi e_j, C_phi e_k>`` by quadrature.

    The Hardy case integrates on the circle of radius ``radius`` (a bias of
    order ``N (1 - radius)``). With ``tol`` set, the computation is repeated
    with half the nodes and a relative disagreement above ``tol`` raises.
    """
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    N = int(N)
    G = _gram_from_rule(phi, _rule_for(phi, alpha, n_radial, n_angular, radius), alpha, N)
    meta = {"n_radial": n_radial, "n_angular": n_angular, "radius": radius}
    if tol is not None:
        G2 = _gram_from_rule(phi, _rule_for(phi, alpha, max(n_radial // 2, 2), max(n_angular // 2, 8), radius),
                             alpha, N)
        err = float(np.max(np.abs(G - G2)) / max(np.max(np.abs(G)), 1e-300))
        meta["disagreement"] = err
        if err > tol:
            raise NumericalError(f"Gram quadrature disagrees between node counts (relative {err:.3e})", (G2, G))
    return OperatorMatrix(G, float(alpha), N, "gram", phi.descriptor, meta)


def kernel_gram(phi: SchurSymbol, alpha: float, n_nodes: int = 2048, radius: float = 1.0) -> OperatorMatrix:
    """Nystrom matrix ``sqrt(omega_i omega_j) K(phi(zeta_i), phi(zeta_j))``.

    Its eigenvalues approximate ``a_n(C_phi)^2``. Nodes follow the norm-defining
    measure, graded towards the boundary contacts of ``phi``. In the Hardy case
    the nodes sit on the unit circle itself: a radius ``r < 1`` would discretize
    ``z -> phi(r z)`` instead, which no longer touches the circle and decays
    geometrically (visible from n ~ 10 for lens maps already at ``r = 1 - 1e-6``).
    """
    alpha = bergman.check_alpha(alpha)
    contacts = boundary_contacts(phi)
    if contacts.inner_like:
        raise DomainError("kernel discretization needs |phi| < 1 almost everywhere on the circle")
    rule = measure_rule(alpha, n_nodes, contacts.angles, radius)
    w = phi._eval(rule.nodes)
    sq = np.sqrt(rule.weights)
    K = (1.0 - w[:, None] * np.conj(w)[None, :]) ** (-(alpha + 2.0))
    S = sq[:, None] * K * sq[None, :]
    S = 0.5 * (S + S.conj().T)
    if phi.is_real:
        # nodes are symmetric under conjugation, so the spectrum is that of a real symmetric matrix
        S = _real_form(S, rule)
    meta = {"n_nodes": len(rule), "radius": radius, "contacts": contacts.angles.tolist()}
    return OperatorMatrix(S, alpha, len(rule) - 1, "kernel", phi.descriptor, meta)


def _real_form(S, rule):
    """Real symmetric matrix unitarily similar to ``S`` when the nodes are closed under conjugation.

    For a real symbol, pairing each node with its conjugate and passing to the
    basis ``(e_p + e_q)/sqrt2, i(e_p - e_q)/sqrt2`` makes the matrix real, which
    halves the cost of the eigensolver. Falls back to ``S`` otherwise.
    """
    z = rule.nodes
    key = np.round(z.real, 14) + 1j * np.round(np.abs(z.imag), 14)
    order = np.lexsort((z.imag, key.imag, key.real))
    zs = z[order]
    selfc = np.abs(zs.imag) <= 1e-15
    P, Q, R = [], [], []
    i = 0
    while i < zs.size:
        if selfc[i]:
            R.append(order[i])
            i += 1
        elif i + 1 < zs.size and abs(zs[i + 1] - np.conj(zs[i])) <= 1e-14:
            P.append(order[i])
            Q.append(order[i + 1])
            i += 2
        else:
            return S
    P, Q, R = (np.array(x, dtype=int) for x in (P, Q, R))
    Spp, Spq = S[np.ix_(P, P)], S[np.ix_(P, Q)]
    Sqp, Sqq = S[np.ix_(Q, P)], S[np.ix_(Q, Q)]
    h = 0.5
    blocks = [
        [h * (Spp + Spq + Sqp + Sqq), 1j * h * (Spp - Spq + Sqp - Sqq)],
        [-1j * h * (Spp + Spq - Sqp - Sqq), h * (Spp - Spq - Sqp + Sqq)],
    ]
    s2 = np.sqrt(0.5)
    if R.size:
        Srr = S[np.ix_(R, R)]
        Srp, Srq = S[np.ix_(R, P)], S[np.ix_(R, Q)]
        Spr, Sqr = S[np.ix_(P, R)], S[np.ix_(Q, R)]
        blocks[0].append(s2 * (Spr + Sqr))
        blocks[1].append(-1j * s2 * (Spr - Sqr))
        blocks.append([s2 * (Srp + Srq), 1j * s2 * (Srp - Srq), Srr])
    T = np.block(blocks)
    scale = max(float(np.max(np.abs(T))), 1e-300)
    if np.max(np.abs(T.imag)) > 1e-12 * scale:
        return S
    T = T.real
    return 0.5 * (T + T.T)


def adjoint_kernel_check(phi: SchurSymbol, alpha: float, a, N: int = 128) -> float:
    """Relative residual of ``C_phi^* K_a = K_{phi(a)}`` in the truncated monomial basis."""
    a = complex(a)
    if abs(a) > 0.9:
        raise DomainError("adjoint check requires |a| <= 0.9")
    M = taylor_matrix(phi, alpha, N).entries
    inv_sw = 1.0 / sqrt_weights(N + 1, alpha)
    k = np.arange(N + 1)
    v_a = np.conj(a) ** k * inv_sw
    b = complex(phi(a))
    v_b = np.conj(b) ** k * inv_sw
    res = M.conj().T @ v_a - v_b
    return float(np.linalg.norm(res) / np.linalg.norm(v_b))


def write_matrix_csv(M: np.ndarray, path) -> None:
    """Row-major CSV; each complex entry becomes a ``re,im`` pair of columns."""
    M = np.asarray(M)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in M:
            out = []
            for x in row:
                x = complex(x)
                out.extend([repr(x.real), repr(x.imag)])
            w.writerow(out)


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            vals = np.array([float(x) for x in row])
            rows.append(vals[0::2] + 1j * vals[1::2])
    return np.array(rows)
