"""Weighted Bergman space primitives on the unit disk.

The space with parameter ``alpha > -1`` carries the norm
``||f||^2 = sum_k w_k |a_k|^2`` with ``w_k = k! Gamma(2+alpha) / Gamma(k+2+alpha)``;
``alpha = -1`` is the Hardy space (all weights equal to one).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateInputError, DomainError, PreconditionError


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha < -1:
        raise DomainError(f"alpha must be >= -1, got {alpha}")
    return alpha


@dataclass(frozen=True)
class BergmanParams:
    alpha: float

    def __post_init__(self):
        check_alpha(self.alpha)

    @property
    def kernel_exponent(self) -> float:
        return self.alpha + 2.0


@dataclass
class CoeffSeries:
    """Taylor coefficients ``a_0 .. a_N`` of a function in the space of index ``alpha``."""

    coeffs: np.ndarray
    alpha: float = -1.0

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs))
        if self.coeffs.ndim != 1:
            raise DomainError("coefficients must be one-dimensional")
        self.alpha = check_alpha(self.alpha)

    def __len__(self):
        return self.coeffs.shape[0]

    @property
    def degree(self) -> int:
        return len(self) - 1

    def __call__(self, z):
        # Horner, highest coefficient first
        return np.polyval(self.coeffs[::-1], z)

    def norm(self) -> float:
        return norm(self)


def log_weights(n: int, alpha: float) -> np.ndarray:
    """``log w_k`` for ``k = 0 .. n-1``."""
    alpha = check_alpha(alpha)
    k = np.arange(n, dtype=float)
    if alpha == -1.0:
        return np.zeros(n)
    return gammaln(k + 1) + gammaln(2 + alpha) - gammaln(k + 2 + alpha)


def weights(n: int, alpha: float) -> np.ndarray:
    return np.exp(log_weights(n, alpha))


def weight(k: int, alpha: float) -> float:
    """Monomial weight ``w_k = ||z^k||^2``; exactly 1 in the Hardy case."""
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k}")
    return float(weights(int(k) + 1, alpha)[-1])


def _check_pair(f: CoeffSeries, g: CoeffSeries):
    if f.alpha != g.alpha:
        raise DomainError(f"alpha mismatch: {f.alpha} vs {g.alpha}")


def inner(f: CoeffSeries, g: CoeffSeries) -> complex:
    _check_pair(f, g)
    n = min(len(f), len(g))
    w = weights(n, f.alpha)
    return complex(np.sum(w * f.coeffs[:n] * np.conj(g.coeffs[:n])))


def norm(f: CoeffSeries) -> float:
    w = weights(len(f), f.alpha)
    return float(np.sqrt(np.sum(w * np.abs(f.coeffs) ** 2)))


def _check_point(a) -> complex:
    a = complex(a)
    if not abs(a) < 1:
        raise DomainError(f"point must lie in the open unit disk, got {a}")
    return a


def kernel_norm_sq(a, alpha: float) -> float:
    """``||K_a||^2 = (1 - |a|^2)^-(alpha+2)``."""
    a = _check_point(a)
    alpha = check_alpha(alpha)
    return float((1.0 - abs(a) ** 2) ** (-(alpha + 2.0)))


def kernel_eval(a, z, alpha: float):
    """Reproducing kernel ``K_a(z) = (1 - conj(a) z)^-(alpha+2)``."""
    a = _check_point(a)
    alpha = check_alpha(alpha)
    return (1.0 - np.conj(a) * np.asarray(z)) ** (-(alpha + 2.0))


def kernel_coeffs(a, alpha: float, N: int) -> CoeffSeries:
    """Taylor coefficients of ``K_a`` up to degree ``N``: ``conj(a)^k / w_k``."""
    a = _check_point(a)
    k = np.arange(N + 1)
    logw = log_weights(N + 1, alpha)
    coeffs = np.conj(a) ** k * np.exp(-logw)
    return CoeffSeries(coeffs, alpha)


def kernel_tail_bound(a, z, alpha: float, N: int) -> float:
    """Bound on ``|K_a(z) - (truncated K_a)(z)|`` from the degree-``N`` cut.

    Uses ``1/w_k = prod_{j<=k} (1 + p/j) <= e^p (k+1)^p`` with ``p = alpha+1`` and a
    geometric tail in ``q = |a z| < 1``.
    """
    alpha = check_alpha(alpha)
    q = abs(complex(a) * complex(z))
    if q >= 1:
        return float("inf")
    p = alpha + 1.0
    # terms t_k = (k+1)^p q^k are eventually decreasing with ratio
    # ((k+2)/(k+1))^p q <= ((N+3)/(N+2))^p q for k >= N+1
    ratio = ((N + 3.0) / (N + 2.0)) ** p * q
    if ratio >= 1:
        return float("inf")
    c = float(np.exp(p))
    first = (N + 2.0) ** p * q ** (N + 1)
    return float(c * first / (1.0 - ratio))


def tail_quotient_bound(n: int, alpha: float) -> float:
    """``exp((alpha+1) H_n)``, which dominates ``w_k / w_{k+n}`` for every ``k``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    alpha = check_alpha(alpha)
    harmonic = float(np.sum(1.0 / np.arange(1, int(n) + 1)))
    return float(np.exp((alpha + 1.0) * harmonic))


@dataclass
class DivisionResult:
    quotient: CoeffSeries
    ratio: float
    bound: float = field(default=float("nan"))


def divide_by_zn(f: CoeffSeries, n: int, tol: float = 0.0) -> DivisionResult:
    """Write ``f = z^n g`` and return ``g`` with ``||g|| / ||f||``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    low = np.abs(f.coeffs[:n])
    if np.any(low > tol):
        k = int(np.argmax(low > tol))
        raise PreconditionError(f"coefficient {k} of f is {f.coeffs[k]!r}, not divisible by z^{n}")
    fn = norm(f)
    if fn == 0:
        raise DegenerateInputError("cannot divide the zero function")
    g = CoeffSeries(f.coeffs[n:].copy(), f.alpha)
    return DivisionResult(g, norm(g) / fn, float(np.sqrt(tail_quotient_bound(n, f.alpha))))
