"""Quadrature rules for the boundary measure ``dt/2pi`` and the weighted area measures.

When a symbol touches the circle, integrands have cusps at the contact angles;
the angular rule is then built from Gauss-Legendre panels whose lengths halve
towards each contact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from .bergman import check_alpha
from .errors import DomainError


@dataclass
class Rule:
    nodes: np.ndarray  # complex points in the closed disk
    weights: np.ndarray  # positive, summing to the total mass (1 for probability measures)

    def __len__(self):
        return self.nodes.size


def uniform_angles(n: int) -> tuple[np.ndarray, np.ndarray]:
    t = 2 * np.pi * np.arange(n) / n - np.pi
    return t, np.full(n, 1.0 / n)


def graded_angles(contacts, n: int, panels: int = 32, ratio: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Angular rule for ``dt/2pi`` with geometric grading towards each contact angle.

    The circle is cut at the contacts and at the midpoints between them; every
    resulting arc has one contact end, is split into ``panels`` panels of
    geometrically shrinking length, and each panel gets the same number of
    Gauss-Legendre nodes (``n`` is the approximate total).
    """
    c = np.sort(np.mod(np.asarray(contacts, dtype=float) + np.pi, 2 * np.pi) - np.pi)
    if c.size == 0:
        return uniform_angles(n)
    m = c.size
    per = max(2, n // (2 * m * panels))
    x, w = np.polynomial.legendre.leggauss(per)
    ts, ws = [], []
    nxt = np.concatenate([c[1:], [c[0] + 2 * np.pi]])
    for a, b in zip(c, nxt):
        mid = 0.5 * (a + b)
        half = mid - a
        # breakpoints half*ratio^j, last panel runs to the contact itself
        brk = half * ratio ** np.arange(panels)
        brk = np.append(brk, 0.0)
        for j in range(panels):
            lo, hi = brk[j + 1], brk[j]
            s = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
            ww = 0.5 * (hi - lo) * w
            ts.extend([a + s, b - s])
            ws.extend([ww, ww])
    t = np.concatenate(ts)
    wt = np.concatenate(ws) / (2 * np.pi)
    t = np.mod(t + np.pi, 2 * np.pi) - np.pi
    order = np.argsort(t, kind="stable")
    return t[order], wt[order]


def circle_rule(n: int, contacts=(), radius: float = 1.0, panels: int = 32) -> Rule:
    """Rule for the normalized arc-length measure on ``|z| = radius``."""
    if not 0 < radius <= 1:
        raise DomainError("radius must lie in (0, 1]")
    t, w = graded_angles(contacts, n, panels) if len(contacts) else uniform_angles(n)
    return Rule(radius * np.exp(1j * t), w)


def radial_rule(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Radii and weights for ``(alpha+1)(1-r^2)^alpha 2r dr`` on [0, 1] (total mass 1).

    Gauss-Jacobi in ``u = r^2``, which integrates ``(alpha+1)(1-u)^alpha du``.
    """
    alpha = check_alpha(alpha)
    if alpha == -1:
        raise DomainError("alpha = -1 has no area measure; use circle_rule")
    x, w = roots_jacobi(n, alpha, 0.0)
    u = 0.5 * (x + 1.0)
    w = w * (alpha + 1.0) * 0.5 ** (alpha + 1.0)
    return np.sqrt(u), w


def disk_rule(alpha: float, n_radial: int, n_angular: int, contacts=(), panels: int = 32) -> Rule:
    """Product rule for the normalized measure ``dA_alpha``."""
    r, wr = radial_rule(alpha, n_radial)
    t, wt = graded_angles(contacts, n_angular, panels) if len(contacts) else uniform_angles(n_angular)
    z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
    return Rule(z, (wr[:, None] * wt[None, :]).ravel())


def measure_rule(alpha: float, n: int, contacts=(), radius: float = 1.0) -> Rule:
    """Rule with about ``n`` nodes for the norm-defining measure of the space with index ``alpha``."""
    alpha = check_alpha(alpha)
    if alpha == -1:
        return circle_rule(n, contacts, radius)
    n_rad = max(8, int(np.sqrt(n / 4)))
    return disk_rule(alpha, n_rad, max(16, n // n_rad), contacts)
