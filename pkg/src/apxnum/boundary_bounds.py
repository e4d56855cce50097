"""Strip-map construction on a radius ``(0, r]`` and the spectrum of the induced restriction operator.

For ``0 < r < 1`` put ``rho = r / (1 + sqrt(1 - r^2))`` (so ``r = 2 rho / (1 + rho^2)``),
``eps = pi / log((1+rho)/(1-rho))`` and ``s = exp(-eps pi / 2)``. With
``phi_rho(z) = (rho - z) / (1 - rho z)`` the map

    chi(z) = eps log((1 + phi_rho(z)) / (1 - phi_rho(z))),    f(z) = s exp(i chi(z))

is bounded by 1 on the disk and winds ``(0, r]`` once around the circle of
radius ``s``. The image ``mu`` of normalized arc length under ``chi^{-1}`` is a
probability measure on ``(0, r]`` and the restriction operator
``R_mu: B_alpha -> L^2(mu)`` satisfies ``a_n(R_mu) >= s^n / sqrt(n)``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import roots_legendre

from .bergman import check_alpha, log_weights
from .errors import BoundViolation, DomainError, NumericalError
from .spectra import SingularSpectrum

BISECTION_STEPS = 100


@dataclass(frozen=True)
class SevilleParams:
    r: float
    rho: float
    eps: float
    s: float


def seville_params(r: float) -> SevilleParams:
    r = float(r)
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    rho = r / (1.0 + np.sqrt((1.0 - r) * (1.0 + r)))
    eps = np.pi / (np.log1p(rho) - np.log1p(-rho))
    return SevilleParams(r, float(rho), float(eps), float(np.exp(-eps * np.pi / 2)))


def _phi_rho(p: SevilleParams, z):
    return (p.rho - z) / (1.0 - p.rho * z)


def seville_chi(p: SevilleParams, z):
    """``eps log((1 + phi_rho)/(1 - phi_rho))``; the argument lies in the right half-plane."""
    z = np.asarray(z, dtype=complex)
    u = _phi_rho(p, z)
    out = p.eps * np.log((1.0 + u) / (1.0 - u))
    return out.item() if out.ndim == 0 else out


def seville_f(p: SevilleParams, z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise DomainError("points must lie in the open disk")
    out = p.s * np.exp(1j * np.asarray(seville_chi(p, z)))
    return out.item() if out.ndim == 0 else out


def chi_inverse(p: SevilleParams, theta):
    """``x in [0, r]`` with ``chi(x) = theta``, for ``theta in [-pi, pi]``.

    ``chi`` decreases from ``pi`` at 0 to ``-pi`` at ``r``; the closed form
    ``x = phi_rho(tanh(theta / (2 eps)))`` is used (``phi_rho`` is an involution).
    """
    t = np.asarray(theta, dtype=float)
    if np.any(np.abs(t) > np.pi * (1 + 1e-14)):
        raise DomainError("theta must lie in [-pi, pi]")
    out = np.clip(_phi_rho(p, np.tanh(t / (2 * p.eps))), 0.0, p.r)
    return out.item() if out.ndim == 0 else out


def chi_inverse_bisect(p: SevilleParams, theta: float, steps: int = BISECTION_STEPS) -> float:
    """Monotone bisection for ``chi(x) = theta`` on ``[0, r]``; a cross-check of :func:`chi_inverse`."""
    theta = float(theta)
    if abs(theta) > np.pi * (1 + 1e-14):
        raise DomainError("theta must lie in [-pi, pi]")
    lo, hi = 0.0, p.r
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if seville_chi(p, mid).real > theta:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    if abs(seville_chi(p, x).real - theta) > 1e-8:
        raise NumericalError(f"bisection did not resolve chi(x) = {theta}")
    return x


def seville_measure_moments(p: SevilleParams, pmax: int, n_nodes: int = 256) -> np.ndarray:
    """``m_k = (1/2 pi) int_{-pi}^{pi} x(theta)^k d theta`` for ``k = 0..pmax`` (Gauss-Legendre)."""
    if int(pmax) != pmax or pmax < 0:
        raise DomainError("pmax must be a nonnegative integer")
    t, w = roots_legendre(n_nodes)
    x = chi_inverse(p, np.pi * t)
    k = np.arange(int(pmax) + 1)
    return 0.5 * (x[None, :] ** k[:, None]) @ w


def _cc_rule(n: int):
    """Clenshaw-Curtis nodes and weights on [-1, 1] (n even) at the current mpmath precision."""
    import mpmath as mp

    cos_tab = [mp.cos(mp.pi * m / n) for m in range(2 * n)]
    nodes, weights = [], []
    for k in range(n + 1):
        acc = mp.mpf(0)
        for j in range(1, n // 2 + 1):
            b = 1 if 2 * j == n else 2
            acc += mp.mpf(b) / (4 * j * j - 1) * cos_tab[(2 * j * k) % (2 * n)]
        c = 1 if k in (0, n) else 2
        nodes.append(cos_tab[k])
        weights.append(mp.mpf(c) / n * (1 - acc))
    return nodes, weights


def _mp_moments(p: SevilleParams, pmax: int, dps: int, n_nodes: int):
    import mpmath as mp

    with mp.workdps(dps):
        r = mp.mpf(p.r)
        rho = r / (1 + mp.sqrt((1 - r) * (1 + r)))
        eps = mp.pi / mp.log((1 + rho) / (1 - rho))
        m = [mp.mpf(0)] * (pmax + 1)
        for t, wt in zip(*_cc_rule(n_nodes)):
            u = mp.tanh(mp.pi * t / (2 * eps))
            x = (rho - u) / (1 - rho * u)
            xp = wt / 2
            for k in range(pmax + 1):
                m[k] += xp
                xp *= x
        return m


def _mp_spectrum(p: SevilleParams, alpha: float, N: int, dps: int, n_nodes: int) -> list:
    import mpmath as mp

    from .extended import mp_eigvalsh

    m = _mp_moments(p, 2 * N, dps, n_nodes)
    with mp.workdps(dps):
        a = mp.mpf(alpha)
        w = [mp.mpf(1)]
        for j in range(1, N + 1):
            w.append(w[-1] * j / (j + 1 + a))
        G = mp.matrix(N + 1, N + 1)
        for j in range(N + 1):
            for k in range(N + 1):
                G[j, k] = m[j + k] / mp.sqrt(w[j] * w[k])
    ev = mp_eigvalsh(G, dps)
    with mp.workdps(dps):
        vals = [mp.sqrt(max(x, mp.mpf(0))) for x in reversed(ev)]
        return vals


def moment_gram(p: SevilleParams, alpha: float, N: int, n_nodes: int = 256) -> np.ndarray:
    """``G_jk = m_{j+k} / sqrt(w_j w_k)`` for ``0 <= j, k <= N`` in double precision."""
    alpha = check_alpha(alpha)
    m = seville_measure_moments(p, 2 * N, n_nodes)
    isw = np.exp(-0.5 * log_weights(N + 1, alpha))
    j = np.arange(N + 1)
    return m[j[:, None] + j[None, :]] * isw[:, None] * isw[None, :]


def seville_floor(s: float, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return s**n / np.sqrt(n)


def restriction_spectrum(p: SevilleParams, alpha: float = -1.0, N: int = 24, precision: str = "auto",
                         agree: float = 1e-10, mp_max: int = 40) -> SingularSpectrum:
    """Singular values of ``R_mu`` restricted to polynomials of degree at most ``N``.

    By min-max these never exceed the true ``a_n(R_mu)``, so the floor test is conservative.

    ``precision="double"`` uses ``eigvalsh``; an index is certified when its
    eigenvalue sits above ``1e-9`` of the largest. ``"mp"`` repeats the
    computation at two working precisions and Clenshaw-Curtis orders sized from
    the floor ``s^N / sqrt(N)``; an index is certified when the two runs agree
    to ``agree``. ``"auto"`` picks ``"mp"`` when the floor drops below ``1e-10``
    and ``N <= mp_max``. A certified index below the floor raises.
    """
    alpha = check_alpha(alpha)
    if int(N) != N or not 1 <= N <= 200:
        raise DomainError("N must be an integer in [1, 200]")
    N = int(N)
    n = np.arange(1, N + 2)
    floors = seville_floor(p.s, n)
    if precision == "auto":
        precision = "mp" if floors[-1] < 1e-10 and N <= mp_max else "double"
    if precision == "double":
        lam = np.linalg.eigvalsh(moment_gram(p, alpha, N))[::-1]
        vals = np.sqrt(np.clip(lam, 0.0, None))
        certified = lam >= 1e-9 * lam[0]
        stability = np.where(certified, 0.0, np.inf)
        meta = {}
    elif precision == "mp":
        dps = int(np.ceil(-2 * np.log10(floors[-1]))) + 25
        v1 = _mp_spectrum(p, alpha, N, dps, 256)
        v2 = _mp_spectrum(p, alpha, N, dps + 20, 512)
        vals = np.array([float(x) for x in v2])
        with np.errstate(divide="ignore", invalid="ignore"):
            stability = np.array([float(abs(a - b) / b) if b != 0 else np.inf for a, b in zip(v1, v2)])
        certified = stability <= agree
        meta = {"dps": [dps, dps + 20], "cc_nodes": [256, 512]}
    else:
        raise DomainError("precision must be 'auto', 'double' or 'mp'")
    bad = certified & (vals < floors * (1 - 1e-9))
    if np.any(bad):
        k = int(np.nonzero(bad)[0][0]) + 1
        raise BoundViolation(f"a_{k} = {vals[k - 1]:.6e} below the floor {floors[k - 1]:.6e}")
    meta.update({"params": asdict(p), "alpha": alpha, "floors": floors.tolist(),
                 "certified": certified.tolist()})
    return SingularSpectrum(vals, N, stability, ~certified, "moment-gram", precision, meta)


def seville_report(r: float, alpha: float = -1.0, N: int = 24, precision: str = "auto") -> dict:
    """JSON-ready report: parameters and per-index ``(a_n, floor, certified)``."""
    p = seville_params(r)
    sp = restriction_spectrum(p, alpha, N, precision)
    floors = sp.meta["floors"]
    return {
        "params": asdict(p),
        "alpha": alpha,
        "N": N,
        "precision": sp.precision,
        "rows": [
            {"n": i + 1, "a_n": float(sp.values[i]), "floor": float(floors[i]), "certified": bool(not sp.flags[i])}
            for i in range(len(sp))
        ],
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
