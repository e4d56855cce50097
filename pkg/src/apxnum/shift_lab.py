"""Interpolation sequences, weighted backward shifts and explicit lower-bound constants.

A weighted backward shift ``B e_{n+1} = w_n e_n`` (``B e_1 = 0``) has
``B^* B`` diagonal, so its singular values are the weight moduli in
decreasing order. Shifts built on an interpolating radial sequence are
compressions of ``C_phi^*`` for symbols with ``phi(r_{n+1}) = r_n``; the
slow-decay pipeline below builds such a sequence with prescribed gap ratios
and certifies the resulting floors.

Radial sequences are handled through their gaps ``1 - r_n`` (see
:mod:`apxnum.radial`).
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from ._kernels import pair_products
from .bergman import check_alpha
from .errors import ConsistencyError, DomainError, PreconditionError
from .radial import RadialSequence, carleson_products_from_log_gaps, radial_carleson_products
from .symbols import lens_gap_from_gap

HADLAC_A = np.pi**2 / 2
INTERPOLATION_LAMBDA = 1.0  # unspecified numerical constant of the interpolation bound

__all__ = [
    "RadialSequence",
    "ShiftModel",
    "OmegaDomain",
    "logconvexify",
    "carleson_constant",
    "interpolation_constant_bounds",
    "hadlac_floor",
    "hoffman_product",
    "boue_floor",
    "boue_ratio_check",
    "shift_from_sequence",
    "shift_matrix",
    "shift_singular",
    "minoration_check",
    "slow_decay_pipeline",
    "omega_from_eps",
    "omega_A",
    "omega_psi",
    "omega_contains",
    "star_shape_violation",
    "hayman_rect_bounds",
    "poincare_sandwich",
    "lens_lower_bound",
]


# --------------------------------------------------------------------------
# log-convex majorants


def logconvexify(eps) -> np.ndarray:
    """Decreasing log-convex sequence ``delta >= eps``.

    ``delta_1, delta_2`` copy the input and ``delta_{n+1} = max(eps_{n+1}, delta_n^2 / delta_{n-1})``.
    An input that is not strictly decreasing is first replaced by ``eps_n + 1/n``.
    """
    e = np.asarray(eps, dtype=float)
    if e.ndim != 1 or e.size == 0:
        raise DomainError("need a nonempty sequence")
    if np.any(e <= 0) or not np.all(np.isfinite(e)):
        raise DomainError("sequence must be positive and finite")
    d = np.diff(e)
    if np.any(d > 0):
        raise DomainError("sequence must be nonincreasing")
    if np.any(d == 0):
        e = e + 1.0 / np.arange(1, e.size + 1)
    out = e.copy()
    for n in range(2, e.size):
        out[n] = max(e[n], out[n - 1] ** 2 / out[n - 2])
    return out


def is_log_convex(delta, rtol: float = 1e-12) -> bool:
    d = np.asarray(delta, dtype=float)
    if d.size < 3:
        return True
    return bool(np.all(d[1:-1] ** 2 <= d[2:] * d[:-2] * (1 + rtol)))


# --------------------------------------------------------------------------
# Carleson and interpolation constants


def carleson_constant(points) -> tuple[float, np.ndarray]:
    """``(min_n delta_n, delta)`` with ``delta_n = prod_{j != n} rho(z_n, z_j)``.

    A :class:`RadialSequence` is evaluated in gap form, which stays accurate
    when the points are within 1e-16 of the circle.
    """
    if isinstance(points, RadialSequence):
        per = radial_carleson_products(points.gaps)
    else:
        z = np.atleast_1d(np.asarray(points, dtype=complex))
        if np.any(np.abs(z) >= 1):
            raise DomainError("points must lie in the open disk")
        if np.unique(z).size != z.size:
            raise DomainError("duplicate points")
        if z.size == 1:
            return 1.0, np.ones(1)
        per = pair_products(z)
    if np.any(per == 0):
        raise DomainError("duplicate points")
    return float(np.min(per)), per


def interpolation_constant_bounds(delta: float, lam: float = INTERPOLATION_LAMBDA) -> tuple[float, float]:
    """``(1/delta, lam (1 + log(1/delta)) / delta)`` bracketing the interpolation constant."""
    if not 0 < delta <= 1:
        raise DomainError("Carleson constant must lie in (0, 1]")
    return 1.0 / delta, lam * (1.0 + np.log(1.0 / delta)) / delta


def _check_sigma(sigma):
    if not 0 < sigma < 1:
        raise DomainError(f"sigma must lie in (0, 1), got {sigma}")


def hadlac_floor(sigma: float) -> float:
    """``exp(-(pi^2/2) / (1 - sigma))``: Carleson-constant floor for gap ratios at most ``sigma``."""
    _check_sigma(sigma)
    return float(np.exp(-HADLAC_A / (1.0 - sigma)))


def hoffman_product(sigma: float, terms: int) -> float:
    """``prod_{j=1}^{terms} ((1 - sigma^j) / (1 + sigma^j))^2``."""
    _check_sigma(sigma)
    j = np.arange(1, int(terms) + 1)
    s = sigma**j
    return float(np.exp(2 * np.sum(np.log1p(-s) - np.log1p(s))))


def boue_floor(sigma: float, theta: float) -> float:
    """``exp(-a_theta / (1 - sigma))`` with ``a_theta = pi^2 / (2^theta theta)``."""
    _check_sigma(sigma)
    if not 0 < theta < 1:
        raise DomainError("theta must lie in (0, 1)")
    a = np.pi**2 / (2**theta * theta)
    return float(np.exp(-a / (1.0 - sigma)))


@dataclass
class BoueCheck:
    ok: bool
    max_ratio: float
    sigma_prime: float


def boue_ratio_check(sigma: float, theta: float, terms: int = 60) -> BoueCheck:
    """Gap ratios of ``v_j = phi_theta(1 - sigma^j)`` against ``1 - (theta/2) 2^theta (1 - sigma)``."""
    _check_sigma(sigma)
    g = lens_gap_from_gap(theta, sigma ** np.arange(1, terms + 1, dtype=float))
    ratios = g[1:] / g[:-1]
    sp = 1.0 - 0.5 * theta * 2**theta * (1.0 - sigma)
    mr = float(np.max(ratios))
    return BoueCheck(mr <= sp * (1 + 1e-12), mr, sp)


# --------------------------------------------------------------------------
# weighted backward shifts


@dataclass
class ShiftModel:
    weights: np.ndarray  # w_1 .. w_M; B e_{n+1} = w_n e_n
    alpha: float = -1.0
    h_descriptor: str = ""
    source: RadialSequence | None = None

    def __post_init__(self):
        self.weights = np.asarray(self.weights)
        check_alpha(self.alpha)

    def __len__(self):
        return self.weights.size

    def singular_values(self) -> np.ndarray:
        return np.sort(np.abs(self.weights))[::-1]


def shift_matrix(model: ShiftModel | np.ndarray) -> np.ndarray:
    """Dense ``(M+1) x (M+1)`` matrix with ``w_n`` on the first superdiagonal."""
    w = model.weights if isinstance(model, ShiftModel) else np.asarray(model)
    return np.diag(w, 1)


def shift_singular(model: ShiftModel, n: int) -> float:
    """``a_n(B)``: the n-th largest weight modulus (0 beyond the section size)."""
    if n < 1:
        raise DomainError("n must be positive")
    sv = model.singular_values()
    return float(sv[n - 1]) if n <= sv.size else 0.0


def shift_from_sequence(r: RadialSequence, alpha: float = -1.0, h: Callable | None = None,
                        h_descriptor: str | None = None) -> ShiftModel:
    """Weights ``|h(r_{n+1})| ((1 - r_{n+1}^2) / (1 - r_n^2))^((alpha+2)/2)``.

    ``h`` must vanish at ``r_1``; the default is ``z - r_1``, evaluated in gap
    form as ``(1 - r_1) - (1 - r_{n+1})``.
    """
    alpha = check_alpha(alpha)
    g = r.gaps
    if len(r) < 2:
        raise DomainError("need at least two points")
    if h is None:
        hv = np.abs(g[0] - g[1:])
        desc = f"z - {1.0 - g[0]!r}"
    else:
        if abs(complex(h(1.0 - g[0]))) > 1e-12:
            raise PreconditionError("h must vanish at r_1")
        hv = np.abs(np.array([complex(h(1.0 - x)) for x in g[1:]]))
        desc = h_descriptor or getattr(h, "__name__", "h")
    q = r.one_minus_sq()
    w = hv * (q[1:] / q[:-1]) ** ((alpha + 2.0) / 2.0)
    return ShiftModel(w, alpha, desc, r)


@dataclass
class MinorationResult:
    ok: bool
    singular: np.ndarray
    eps: np.ndarray


def minoration_check(weights, eps) -> MinorationResult:
    """If ``|w_n| >= eps_n`` with ``eps`` nonincreasing then ``a_n(B) >= eps_n``; checked on the dense matrix."""
    w = np.abs(np.asarray(weights))
    e = np.asarray(eps, dtype=float)
    if e.size != w.size:
        raise DomainError("weights and eps must have the same length")
    if np.any(np.diff(e) > 0):
        raise DomainError("eps must be nonincreasing")
    if np.any(w < e):
        raise PreconditionError("the minoration needs |w_n| >= eps_n")
    sv = np.linalg.svd(shift_matrix(w), compute_uv=False)[: w.size]
    return MinorationResult(bool(np.all(sv >= e * (1 - 1e-12))), sv, e)


def slow_decay_pipeline(eps, C0: float = 1.0, M: int | None = None, alpha: float = -1.0,
                        lam: float = INTERPOLATION_LAMBDA):
    """Shift-level realization of a prescribed slow decay ``eps``.

    After log-convexification ``delta``, the gaps follow
    ``(1 - r_{n+1}) / (1 - r_n) = exp(-2 C0 A_n)`` with ``A_n = log(1/delta_n) / C0``
    and ``r_1 = 1/2``; the shift uses ``h(z) = z - r_1``. If ``delta_1 >= 1`` the
    sequence is first rescaled so that ``delta_1 = 1/2`` (recorded as
    ``eps_scale``; floors refer to the rescaled sequence). Everything is computed
    from log-gaps, so gaps far below the double range are handled. Returns the
    model and a JSON-ready report of the checks and of the inherited floor constant.
    """
    e = np.asarray(eps, dtype=float)
    if M is not None:
        e = e[:M]
    M = e.size
    if M < 2:
        raise DomainError("need at least two terms")
    alpha = check_alpha(alpha)
    if e[-1] > 0.5 * e[0]:
        warnings.warn("eps does not decay appreciably within M terms", stacklevel=2)
    delta = logconvexify(e)
    # the construction needs delta_1 < 1 (else r_2 = r_1); the conclusion
    # a_n >= const * eps_n is invariant under rescaling eps
    scale = 1.0
    if delta[0] >= 1.0:
        scale = 0.5 / delta[0]
        e, delta = e * scale, delta * scale
    eta = 1.0 / C0
    A = eta * np.log(1.0 / delta)
    log_ratio = -2.0 * C0 * A
    L = np.log(0.5) + np.concatenate([[0.0], np.cumsum(log_ratio)])  # M+1 log-gaps
    g = np.exp(L)  # may underflow to 0; only used where that is harmless
    ratio = np.exp(log_ratio)
    # |h(r_{n+1})| ((1 - r_{n+1}^2) / (1 - r_n^2))^((alpha+2)/2)
    q_ratio = ratio * (2.0 - g[1:]) / (2.0 - g[:-1])
    w = (g[0] - g[1:]) * q_ratio ** ((alpha + 2.0) / 2.0)
    source = RadialSequence(g) if np.all(g > 0) and np.all(np.diff(g) < 0) else None
    model = ShiftModel(w, alpha, f"z - {1.0 - g[0]!r}", source)
    d = (g[0] - g[1]) / np.sqrt(2.0)
    hn_sup = float(np.max(ratio))
    weights_ok = bool(np.all(w >= d * e * (1 - 1e-12)))
    sv = np.linalg.svd(shift_matrix(w), compute_uv=False)[:M]
    sv_ok = bool(np.all(sv >= d * e * (1 - 1e-12)))
    cc = float(np.min(carleson_products_from_log_gaps(L)))
    C = interpolation_constant_bounds(cc, lam)[1]
    floor_const = d / (2 * C**2)
    report = {
        "inputs": {"M": M, "C0": C0, "alpha": alpha, "lambda": lam, "eps_scale": scale},
        "constants": {"eta": eta, "d": float(d), "carleson_delta": cc, "C": float(C),
                      "floor_delta": float(floor_const)},
        "checks": {
            "log_convex": is_log_convex(delta) and bool(np.all(delta >= e)),
            "hayman_newman": hn_sup < 1.0,
            "hayman_newman_sup": hn_sup,
            "weights_floor": weights_ok,
            "singular_floor": sv_ok,
            "inherited_floor": bool(np.all(floor_const * e <= sv)),
        },
        "table": [
            {"n": i + 1, "log10_gap": float(L[i] / np.log(10)), "w": float(w[i]), "a_n": float(sv[i]),
             "eps": float(e[i]), "floor": float(d * e[i])}
            for i in range(M)
        ],
    }
    report["checks"]["all_pass"] = all(report["checks"][k] for k in
                                       ("log_convex", "hayman_newman", "weights_floor", "singular_floor"))
    return model, report


def pipeline_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


# --------------------------------------------------------------------------
# the star-shaped domain and hyperbolic distance estimates


@dataclass
class OmegaDomain:
    A_seq: np.ndarray  # A_1 .. A_M, positive, increasing, concave
    eta: float = 1.0
    K: float = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.A_seq, dtype=float)
        if a.ndim != 1 or a.size < 2 or np.any(a <= 0):
            raise DomainError("need at least two positive values A_n")
        if np.any(np.diff(a) <= 0):
            raise DomainError("A_n must increase")
        full = np.concatenate([[0.0], a])
        if np.any(np.diff(full, 2) > 1e-12 * np.max(a)):
            raise DomainError("A_n must be concave")
        self.A_seq = a
        self.K = 1.0 / (2.0 * a[0])

    @property
    def knots(self) -> tuple[np.ndarray, np.ndarray]:
        """Abscissae ``0, 1, e, e^2, ...`` and values ``0, A_1, A_2, ...``."""
        x = np.concatenate([[0.0], np.exp(np.arange(self.A_seq.size))])
        return x, np.concatenate([[0.0], self.A_seq])


def omega_from_eps(eps, eta: float = 1.0) -> OmegaDomain:
    """``A_n = eta log(1/eps_n)`` for a decreasing log-convex ``eps``."""
    e = np.asarray(eps, dtype=float)
    return OmegaDomain(eta * np.log(1.0 / e), eta)


def omega_A(t, dom: OmegaDomain):
    """Piecewise-linear ``A``; extended beyond the last knot with the last slope."""
    x, y = dom.knots
    t = np.abs(np.asarray(t, dtype=float))
    out = np.interp(t, x, y)
    slope = (y[-1] - y[-2]) / (x[-1] - x[-2])
    out = np.where(t > x[-1], y[-1] + slope * (t - x[-1]), out)
    return out.item() if out.ndim == 0 else out


def omega_psi(t, dom: OmegaDomain):
    """``K(1 + |t|)`` for ``|t| <= 1`` and ``|t| / A(|t|)`` beyond."""
    t = np.abs(np.asarray(t, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(t <= 1.0, dom.K * (1.0 + t), t / np.asarray(omega_A(np.maximum(t, 1.0), dom)))
    return out.item() if out.ndim == 0 else out


def omega_contains(w, dom: OmegaDomain):
    w = np.asarray(w, dtype=complex)
    out = np.abs(w.imag) < omega_psi(w.real, dom)
    return out.item() if np.ndim(out) == 0 else out


def star_shape_violation(dom: OmegaDomain, lambdas=None, xs=None) -> float:
    """``max (lambda psi(x) - psi(lambda x))`` over a grid; nonpositive for a star-shaped domain."""
    lambdas = np.linspace(0.0, 1.0, 101) if lambdas is None else np.asarray(lambdas, dtype=float)
    xs = np.geomspace(1e-3, 10 * np.exp(dom.A_seq.size), 400) if xs is None else np.asarray(xs, dtype=float)
    L, X = np.meshgrid(lambdas, xs, indexing="ij")
    return float(np.max(L * omega_psi(X, dom) - omega_psi(L * X, dom)))


def hayman_rect_bounds(a1: float, a2: float, b_or_c: float, kind: str) -> float:
    """Hyperbolic distance estimates for domains containing (or bounded by) a rectangle.

    ``upper``: ``pi (a2 - a1) / (4b) + pi/2``; ``lower``: ``pi (a2 - a1) / (4c) - pi/2``.
    """
    if not a1 < a2:
        raise DomainError("need a1 < a2")
    if b_or_c <= 0:
        raise DomainError("half-height must be positive")
    base = np.pi / (4.0 * b_or_c) * (a2 - a1)
    if kind == "upper":
        return float(base + np.pi / 2)
    if kind == "lower":
        return float(base - np.pi / 2)
    raise DomainError("kind must be 'upper' or 'lower'")


def poincare_sandwich(a: float, b: float) -> tuple[float, float, float]:
    """``(e^{-2d(a,b)}, (1-b)/(1-a), 2 e^{-2d(a,b)})`` for ``0 <= a < b < 1``.

    ``e^{-2d} = (1-rho)/(1+rho)`` simplifies to ``mid (1+a)/(1+b)``, which is
    evaluated directly to avoid cancellation.
    """
    if not 0 <= a < b < 1:
        raise DomainError("need 0 <= a < b < 1")
    mid = (1.0 - b) / (1.0 - a)
    lo = mid * (1.0 + a) / (1.0 + b)
    hi = 2.0 * lo
    if not lo <= mid <= hi:
        raise ConsistencyError(f"sandwich violated at a={a!r}, b={b!r}: {lo} <= {mid} <= {hi}")
    return lo, mid, hi


# --------------------------------------------------------------------------
# explicit lower bound for lens maps


@dataclass
class LensFloor:
    floor: float
    b_theta: float
    sigma_used: float
    C_u: float
    C_v: float
    tuned: bool  # True when sigma came from the asymptotic tuning


def _lens_floor_at(theta, n, sigma, lam):
    Cu = interpolation_constant_bounds(hadlac_floor(sigma), lam)[1]
    Cv = interpolation_constant_bounds(boue_floor(sigma, theta), lam)[1]
    return 0.5 / (Cu * Cv) * sigma ** (n * (1 - theta) / 2.0), Cu, Cv


def lens_lower_bound(theta: float, n: int, lam: float = INTERPOLATION_LAMBDA, fallback: bool = False) -> LensFloor:
    """Explicit floor ``(1/2) C_u^{-1} C_v^{-1} sigma^{n(1-theta)/2}`` for ``a_n(C_{phi_theta})``.

    ``sigma = 1 - lambda_t / sqrt(n)`` with ``lambda_t = sqrt(2 a_theta / (1-theta))`` and
    ``a_theta = pi^2/theta``; the interpolation constants are bounded through
    the Carleson-constant floors of the two geometric sequences involved. When
    ``n`` is too small for this ``sigma`` to be positive, ``fallback=True``
    maximizes the same explicit floor over ``sigma`` in (0, 1) instead of raising.
    """
    if not 0 < theta < 1:
        raise DomainError("theta must lie in (0, 1)")
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    a_theta = np.pi**2 / theta
    lam_t = np.sqrt(2 * a_theta / (1 - theta))
    b_theta = np.pi * np.sqrt(2 * (1 - theta) / theta)
    sigma = 1.0 - lam_t / np.sqrt(n)
    if sigma > 0:
        f, Cu, Cv = _lens_floor_at(theta, n, sigma, lam)
        return LensFloor(float(f), float(b_theta), float(sigma), float(Cu), float(Cv), True)
    if not fallback:
        raise DomainError(f"n = {n} too small: tuned sigma = {sigma:.4f} <= 0 (needs n > {lam_t**2:.1f})")
    res = minimize_scalar(lambda s: -np.log(_lens_floor_at(theta, n, s, lam)[0]), bounds=(1e-6, 1 - 1e-6),
                          method="bounded", options={"xatol": 1e-10})
    s = float(res.x)
    f, Cu, Cv = _lens_floor_at(theta, n, s, lam)
    return LensFloor(float(f), float(b_theta), s, float(Cu), float(Cv), False)
