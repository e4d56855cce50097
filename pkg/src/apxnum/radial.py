"""Increasing radial sequences in (0, 1), stored through their gaps ``1 - r_n``.

Sequences produced by backward orbits or by the slow-decay construction approach
1 so fast that ``r_n`` itself rounds to 1.0 after a few terms; every quantity here
is therefore computed from the gaps.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass
class RadialSequence:
    gaps: np.ndarray  # 1 - r_n, strictly decreasing, in (0, 1)

    def __post_init__(self):
        g = np.asarray(self.gaps, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise DomainError("need a nonempty one-dimensional gap sequence")
        if np.any(g <= 0) or np.any(g >= 1):
            raise DomainError("gaps 1 - r_n must lie in (0, 1)")
        if np.any(np.diff(g) >= 0):
            raise DomainError("radial sequence must be strictly increasing")
        self.gaps = g

    @classmethod
    def from_points(cls, points) -> "RadialSequence":
        return cls(1.0 - np.asarray(points, dtype=float))

    def __len__(self):
        return self.gaps.size

    @property
    def points(self) -> np.ndarray:
        return 1.0 - self.gaps

    @property
    def ratios(self) -> np.ndarray:
        """``(1 - r_{n+1}) / (1 - r_n)``."""
        return self.gaps[1:] / self.gaps[:-1]

    def hayman_newman(self, rho: float | None = None) -> tuple[bool, float]:
        """Whether every ratio is at most ``rho`` (default: the observed sup, required < 1)."""
        if len(self) < 2:
            return True, 0.0
        sup = float(np.max(self.ratios))
        if rho is None:
            return sup < 1.0, sup
        return sup <= rho, sup

    def one_minus_sq(self) -> np.ndarray:
        """``1 - r_n^2 = g (2 - g)`` without cancellation."""
        return self.gaps * (2.0 - self.gaps)


def radial_pseudo_hyperbolic(g_a, g_b):
    """``rho(a, b)`` for real ``a, b`` in (0,1) given by gaps ``1-a``, ``1-b``.

    ``|b - a| / (1 - ab)`` with ``1 - ab = g_a + g_b - g_a g_b``.
    """
    g_a = np.asarray(g_a, dtype=float)
    g_b = np.asarray(g_b, dtype=float)
    return np.abs(g_a - g_b) / (g_a + g_b - g_a * g_b)


def radial_carleson_products(gaps) -> np.ndarray:
    """``delta_n = prod_{j != n} rho(r_n, r_j)`` evaluated in gap form."""
    g = np.asarray(gaps, dtype=float)
    if np.any(g <= 0):
        raise DomainError("gaps must be positive")
    return carleson_products_from_log_gaps(np.log(g))


def carleson_products_from_log_gaps(log_gaps) -> np.ndarray:
    """Carleson products from ``log(1 - r_n)``; valid after the gaps underflow.

    With ``t = exp(-|l_a - l_b|)`` and ``g`` the smaller gap,
    ``rho = (1 - t) / (1 + t - g)``.
    """
    L = np.asarray(log_gaps, dtype=float)
    diff = np.abs(L[:, None] - L[None, :])
    gmin = np.exp(np.minimum(L[:, None], L[None, :]))
    t = np.exp(-diff)
    rho = -np.expm1(-diff) / (1.0 + t - gmin)
    np.fill_diagonal(rho, 1.0)
    if np.any(rho == 0):
        raise DomainError("duplicate points")
    return np.exp(np.sum(np.log(rho), axis=1))
