"""Carleson windows, pushforward measures and the upper-bound evaluators built on them.

The pushforward of the normalized measure of the space under ``phi`` is sampled
by Monte Carlo. For the Hardy space the boundary values ``phi(e^{it})`` are
sampled; when ``phi`` touches the circle, the samples are drawn from a
defensive mixture of the uniform law and power laws concentrated at the
contact angles, and reweighted (weights never exceed 2). The window maximal
function ``rho(h) = sup_xi mu(W(xi, h))`` is then computed exactly for the
weighted empirical measure by a circular sweep over sorted angles.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from ._kernels import window_max
from .bergman import check_alpha
from .errors import DomainError
from .symbols import SchurSymbol, boundary_contacts

DEFAULT_STREAMS = 8


def window_contains(z, xi_angle: float, h: float):
    """Membership in ``W(xi, h) = {|z| >= 1-h, |arg(z conj(xi))| <= pi h}``."""
    if not 0 < h < 1:
        raise DomainError("h must lie in (0, 1)")
    z = np.asarray(z, dtype=complex)
    rel = np.angle(z * np.exp(-1j * xi_angle))
    out = (np.abs(z) >= 1.0 - h) & (np.abs(rel) <= np.pi * h)
    return out.item() if out.ndim == 0 else out


@dataclass
class CarlesonProfile:
    h_grid: np.ndarray
    rho_hat: np.ndarray
    stderr: np.ndarray
    sample_count: int
    seed: int
    alpha: float = -1.0
    symbol: str = ""
    xi_hat: np.ndarray = None  # angle of the maximizing window
    meta: dict = field(default_factory=dict)

    def to_csv(self, path):
        """Columns ``h, rho_hat, stderr``; ``path`` may be an open text stream."""
        if hasattr(path, "write"):
            self._write_rows(path)
        else:
            with open(path, "w", newline="") as fh:
                self._write_rows(fh)

    def _write_rows(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["h", "rho_hat", "stderr"])
        for h, r, s in zip(self.h_grid, self.rho_hat, self.stderr):
            w.writerow([repr(float(h)), repr(float(r)), repr(float(s))])

    def as_dict(self) -> dict:
        return {
            "symbol": self.symbol,
            "alpha": self.alpha,
            "seed": self.seed,
            "sample_count": self.sample_count,
            "h": [float(x) for x in self.h_grid],
            "rho_hat": [float(x) for x in self.rho_hat],
            "stderr": [float(x) for x in self.stderr],
            "meta": self.meta,
        }


# --------------------------------------------------------------------------
# sampling


def _streams(seed: int, n_streams: int):
    base = np.random.Philox(int(seed))
    return [np.random.Generator(base.jumped(i)) for i in range(n_streams)]


def _split(total: int, parts: int):
    q, r = divmod(total, parts)
    return [q + (1 if i < r else 0) for i in range(parts)]


def sample_boundary_angles(n: int, seed: int, contacts=(), mix: float = 0.5, gamma: float = 0.25,
                           n_streams: int = DEFAULT_STREAMS):
    """Angles with importance weights for the normalized arc measure.

    With contacts, each sample comes from the uniform law with probability
    ``1 - mix`` and otherwise from ``|t - c| = pi U^(1/gamma)`` around a random
    contact ``c``. Weights are ``p/q``, bounded by ``1/(1-mix)``.
    """
    contacts = np.asarray(contacts, dtype=float)
    ts, ws = [], []
    for rng, m in zip(_streams(seed, n_streams), _split(n, n_streams)):
        if contacts.size == 0 or mix == 0:
            ts.append(rng.uniform(-np.pi, np.pi, m))
            ws.append(np.ones(m))
            continue
        use_pl = rng.random(m) < mix
        t = rng.uniform(-np.pi, np.pi, m)
        k = int(use_pl.sum())
        c = contacts[rng.integers(0, contacts.size, k)]
        s = np.pi * rng.random(k) ** (1.0 / gamma)
        sign = np.where(rng.random(k) < 0.5, -1.0, 1.0)
        t[use_pl] = c + sign * s
        t = np.mod(t + np.pi, 2 * np.pi) - np.pi
        # mixture density relative to the uniform density 1/(2 pi)
        dens = np.zeros(m)
        for cc in contacts:
            d = np.abs(np.angle(np.exp(1j * (t - cc))))
            with np.errstate(divide="ignore"):
                dens += gamma * (d / np.pi) ** (gamma - 1.0)
        q = (1.0 - mix) + mix * dens / contacts.size
        ts.append(t)
        ws.append(1.0 / q)
    return np.concatenate(ts), np.concatenate(ws)


def sample_disk(n: int, alpha: float, seed: int, n_streams: int = DEFAULT_STREAMS):
    """Points from ``(alpha+1)(1-|z|^2)^alpha dA/pi`` by inverse CDF in ``u = r^2``."""
    zs = []
    for rng, m in zip(_streams(seed, n_streams), _split(n, n_streams)):
        u = 1.0 - rng.random(m) ** (1.0 / (alpha + 1.0))
        t = rng.uniform(-np.pi, np.pi, m)
        zs.append(np.sqrt(u) * np.exp(1j * t))
    return np.concatenate(zs)


def _window_sup(w: np.ndarray, weights: np.ndarray, n: int, h: float):
    keep = np.abs(w) >= 1.0 - h
    if not np.any(keep):
        return 0.0, 0.0, float("nan")
    ang = np.angle(w[keep])
    wt = weights[keep]
    order = np.argsort(ang, kind="stable")
    ang, wt = ang[order], wt[order]
    ang = np.where(ang >= np.pi, ang - 2 * np.pi, ang)
    best, i, j = window_max(ang, wt, 2 * np.pi * h)
    m = ang.size
    idx = np.arange(i, j) % m
    rho = best / n
    var = max(float(np.sum(wt[idx] ** 2)) / n - rho**2, 0.0) / n
    return rho, float(np.sqrt(var)), float(ang[i] + np.pi * h)


def default_h_grid(lo: float = 1e-3, hi: float = 1e-1, count: int = 13) -> np.ndarray:
    return np.geomspace(hi, lo, count)


def pushforward_profile(phi: SchurSymbol, alpha: float, h_grid=None, samples: int = 10**6, seed: int = 0,
                        radius: float = 1.0, importance: bool | str = "auto",
                        n_streams: int = DEFAULT_STREAMS) -> CarlesonProfile:
    """Monte Carlo estimate of ``rho_{phi, alpha+2}(h)`` on a grid of window sizes.

    ``radius`` is where boundary values are read in the Hardy case (builtin
    symbols extend continuously to the circle, so the default is 1). Samples
    are split over ``n_streams`` Philox sub-streams jumped from ``seed``.
    """
    alpha = check_alpha(alpha)
    h_grid = default_h_grid() if h_grid is None else np.asarray(h_grid, dtype=float)
    if np.any((h_grid <= 0) | (h_grid >= 1)):
        raise DomainError("window sizes must lie in (0, 1)")
    meta: dict = {"radius": radius, "n_streams": n_streams}
    if alpha == -1:
        contacts = ()
        if importance:
            bc = boundary_contacts(phi)
            contacts = () if bc.inner_like else tuple(bc.angles)
        meta["importance_contacts"] = list(contacts)
        t, wts = sample_boundary_angles(samples, seed, contacts, n_streams=n_streams)
        w = phi._eval(radius * np.exp(1j * t))
    else:
        z = sample_disk(samples, alpha, seed, n_streams)
        wts = np.ones(samples)
        w = phi._eval(z)
    rho = np.empty(h_grid.size)
    err = np.empty(h_grid.size)
    xi = np.empty(h_grid.size)
    for k, h in enumerate(h_grid):
        rho[k], err[k], xi[k] = _window_sup(w, wts, samples, float(h))
    return CarlesonProfile(h_grid, rho, err, samples, int(seed), alpha, phi.descriptor, xi, meta)


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    points: int


def profile_slope(p: CarlesonProfile, h_min: float = 1e-3, h_max: float = 1e-1) -> SlopeFit:
    """Least-squares slope of ``log rho_hat`` against ``log h`` on ``[h_min, h_max]``."""
    sel = (p.h_grid >= h_min * (1 - 1e-12)) & (p.h_grid <= h_max * (1 + 1e-12)) & (p.rho_hat > 0)
    if sel.sum() < 3:
        raise DomainError("need at least three positive profile points in the fitting range")
    x, y = np.log(p.h_grid[sel]), np.log(p.rho_hat[sel])
    slope, icpt = np.polyfit(x, y, 1)
    pred = slope * x + icpt
    r2 = 1.0 - float(np.sum((y - pred) ** 2)) / float(np.sum((y - y.mean()) ** 2))
    return SlopeFit(float(slope), float(icpt), r2, int(sel.sum()))


def embedding_norm_bounds(p: CarlesonProfile, alpha: float | None = None, nsigma: float = 2.0) -> tuple[float, float]:
    """Shape of the embedding norm, ``sup_h sqrt(rho(h) / h^(2+alpha))`` (constant 1).

    The two values use ``rho_hat -/+ nsigma * stderr``.
    """
    alpha = p.alpha if alpha is None else check_alpha(alpha)
    h = p.h_grid
    lo = np.sqrt(np.clip(p.rho_hat - nsigma * p.stderr, 0, None) / h ** (2 + alpha))
    hi = np.sqrt(np.clip(p.rho_hat + nsigma * p.stderr, 0, None) / h ** (2 + alpha))
    return float(np.max(lo)), float(np.max(hi))


# --------------------------------------------------------------------------
# upper-bound evaluators (shapes, constant 1)


@dataclass
class TernaryResult:
    value: float
    h_star: float
    boundary: bool  # minimizer sits at an end of the grid

    def as_dict(self):
        return asdict(self)


def _ternary_terms(n, alpha, rho_h, h):
    return n ** ((alpha + 1) / 2) * (1.0 - h) ** n + np.sqrt(np.maximum(rho_h, 0.0) / h ** (2 + alpha))


def ternary_upper_bound(n: int, alpha: float, rho: CarlesonProfile | Callable, h_grid=None) -> TernaryResult:
    """``inf_h [n^((alpha+1)/2) (1-h)^n + sqrt(rho(h) / h^(2+alpha))]``.

    For a closed-form ``rho`` the grid minimum is refined by a bounded
    golden-section search between its neighbours; a profile is minimized on
    its own grid.
    """
    alpha = check_alpha(alpha)
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if isinstance(rho, CarlesonProfile):
        h = rho.h_grid
        vals = _ternary_terms(n, alpha, rho.rho_hat, h)
        k = int(np.argmin(vals))
        return TernaryResult(float(vals[k]), float(h[k]), k in (0, h.size - 1) and h.size > 1)
    h = np.geomspace(1e-8, 1 - 1e-8, 2001) if h_grid is None else np.asarray(h_grid, dtype=float)
    h = np.sort(h)
    f = lambda x: float(_ternary_terms(n, alpha, rho(x), x))
    vals = np.array([f(x) for x in h])
    k = int(np.argmin(vals))
    boundary = k in (0, h.size - 1)
    best, hs = float(vals[k]), float(h[k])
    if not boundary:
        res = optimize.minimize_scalar(f, bounds=(h[k - 1], h[k + 1]), method="bounded", options={"xatol": 1e-14})
        if res.fun < best:
            best, hs = float(res.fun), float(res.x)
    return TernaryResult(best, hs, boundary)


def supper_bound(n: int, alpha: float, A: Callable[[float], float]) -> float:
    """``n^((alpha+1)/2) exp(-n A^{-1}(1/(2n)))`` with ``A^{-1}`` found by bracketing on (0, 1]."""
    alpha = check_alpha(alpha)
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    target = 1.0 / (2 * n)
    g = lambda h: A(h) - target
    top = g(1.0)
    if top < 0:
        raise DomainError(f"A(1) = {A(1.0)} < 1/(2n): A is not invertible at the target")
    if top == 0:
        hinv = 1.0
    else:
        lo = 0.0
        if g(lo) > 0:
            raise DomainError("A(0) must be 0")
        try:
            hinv = optimize.brentq(g, lo, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        except (ValueError, RuntimeError) as exc:
            raise DomainError(f"inverting A failed: {exc}") from exc
    return float(n ** ((alpha + 1) / 2) * np.exp(-n * hinv))


def imprecise_gamma(alpha: float, beta_exp: float) -> float:
    alpha = check_alpha(alpha)
    if beta_exp <= 1:
        raise DomainError("the exponent must exceed 1")
    return (beta_exp - 1.0) * (alpha + 2.0) / 2.0


def imprecise_bound(n: int, alpha: float, beta_exp: float) -> float:
    """``(log n / n)^gamma`` with ``gamma = (beta-1)(alpha+2)/2``."""
    g = imprecise_gamma(alpha, beta_exp)
    if n < 2:
        raise DomainError("n must be at least 2")
    return float((np.log(n) / n) ** g)


def schatten_threshold(alpha: float, beta_exp: float) -> float:
    """``p* = 2 / ((beta-1)(alpha+2))``: membership in ``S_p`` for every ``p > p*``."""
    return 1.0 / imprecise_gamma(alpha, beta_exp)


# --------------------------------------------------------------------------
# Nevanlinna counting function for univalent symbols


def nevanlinna(phi: SchurSymbol, w, alpha: float) -> float:
    """``[log(1/|z|)]^(alpha+2)`` for the single preimage ``z`` of ``w``."""
    alpha = check_alpha(alpha)
    w = complex(w)
    if not abs(w) < 1:
        raise DomainError("w must lie in the open disk")
    z = complex(phi.inverse(w))
    if not abs(z) < 1:
        raise DomainError(f"{w} is not in the image of {phi.descriptor}")
    if abs(complex(phi(z)) - w) > 1e-9 * max(1.0, abs(w)):
        raise DomainError(f"inverse check failed at {w}")
    if z == 0:
        raise DomainError("w = phi(0) has infinite counting function")
    n1 = np.log(1.0 / abs(z))
    value = n1 ** (alpha + 2.0)
    # a single preimage: the generalized function is a power of the classical one
    assert value == n1 ** (alpha + 2.0)
    return float(value)


def nevanlinna_identity(phi: SchurSymbol, w, alpha: float) -> float:
    """``(alpha+2)(alpha+1) int_0^1 N_phi(r, w) [log(1/r)]^alpha dr/r`` by quadrature.

    ``N_phi(r, w) = max(0, log(r / |z|))`` for the single preimage ``z``. In the
    variable ``s = log(1/r)`` the integrand is ``(L - s) s^alpha`` on ``(0, L)``.
    """
    alpha = check_alpha(alpha)
    if alpha == -1:
        raise DomainError("the area identity needs alpha > -1")
    z = complex(phi.inverse(complex(w)))
    L = np.log(1.0 / abs(z))
    val, _ = integrate.quad(lambda s: (L - s) * s**alpha, 0.0, L, limit=200)
    return float((alpha + 2) * (alpha + 1) * val)


def bounds_report(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)
