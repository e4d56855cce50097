"""Schur functions: analytic self-maps of the unit disk.

Each builtin symbol is an immutable object exposing evaluation, derivative, the
pseudo-hyperbolic derivative ``phi^#``, Taylor coefficients and (when univalent)
an explicit inverse. Symbols round-trip through a small text grammar, e.g.
``lens:0.5``, ``conj:lens:0.5@0.25`` or ``compose:[mobius:0.5;shrink:0.8]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .bergman import CoeffSeries
from .errors import ConsistencyError, DomainError, NumericalError
from .radial import RadialSequence

BOUNDARY_TOL = 1e-12
VALIDATION_RADIUS = 0.999


def _as_array(z):
    return np.asarray(z, dtype=complex)


def _check_disk(z, closed: bool = True):
    z = _as_array(z)
    r = np.abs(z)
    if closed:
        bad = r > 1.0 + BOUNDARY_TOL
    else:
        bad = r >= 1.0
    if np.any(bad):
        raise DomainError(f"point outside the {'closed' if closed else 'open'} unit disk: max |z| = {r.max()}")
    return z


def _fmt(x) -> str:
    """Round-trippable literal for a real or complex parameter."""
    x = complex(x)
    if x.imag == 0:
        return repr(float(x.real))
    return repr(x).strip("()")


def _unwrap(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


# --------------------------------------------------------------------------
# base class


class SchurSymbol:
    """Analytic self-map of the disk.

    Subclasses implement ``_eval``, ``_deriv`` and ``descriptor``; the rest has
    generic fallbacks (``sharp`` from the derivative, ``taylor`` by a Cauchy
    integral on two radii).
    """

    kind: str = "abstract"
    automorphism: bool = False

    # -- to override
    def _eval(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _deriv(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inverse(self, w: np.ndarray) -> np.ndarray:
        raise DomainError(f"{self.descriptor} has no explicit inverse")

    def _taylor_closed(self, N: int, dtype) -> np.ndarray | None:
        return None

    @property
    def descriptor(self) -> str:
        raise NotImplementedError

    # -- public
    def __call__(self, z):
        return _unwrap(self._eval(_check_disk(z)))

    def derivative(self, z):
        return _unwrap(self._deriv(_check_disk(z, closed=False)))

    def sharp(self, z):
        """``|phi'(z)| (1-|z|^2) / (1-|phi(z)|^2)``."""
        z = _check_disk(z, closed=False)
        return _unwrap(self._sharp(z))

    def _sharp(self, z):
        w = self._eval(z)
        num = np.abs(self._deriv(z)) * (1.0 - np.abs(z) ** 2)
        den = 1.0 - np.abs(w) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / den
        return np.where(den > 0, out, 1.0)

    def inverse(self, w):
        return _unwrap(self._inverse(_check_disk(w)))

    @property
    def has_inverse(self) -> bool:
        try:
            self._inverse(np.zeros(1, dtype=complex))
        except DomainError:
            return False
        return True

    def taylor(self, N: int, extended: bool = False, tol: float = 1e-8) -> CoeffSeries:
        """Coefficients ``a_0 .. a_N`` of ``phi`` at the origin.

        Closed forms are used when available (also in extended precision).
        Otherwise a trapezoidal Cauchy integral is evaluated on two radii and
        the results must agree to ``tol`` relative to the largest coefficient.
        """
        if int(N) != N or N < 1:
            raise DomainError(f"N must be a positive integer, got {N}")
        N = int(N)
        dtype = np.clongdouble if extended else np.complex128
        c = self._taylor_closed(N, dtype)
        if c is None:
            c = cauchy_coefficients(self._eval, N, tol=tol).astype(dtype)
        c = np.asarray(c)
        if self.is_real:
            c = c.real.copy()
        return CoeffSeries(c, -1.0)

    @property
    def is_real(self) -> bool:
        """Whether ``phi(conj z) = conj phi(z)``, i.e. all Taylor coefficients are real."""
        z = np.array([0.3 + 0.4j, -0.5 + 0.1j, 0.05 - 0.7j, 0.6 + 0.0j])
        w = self._eval(z)
        return bool(np.allclose(self._eval(np.conj(z)), np.conj(w), rtol=0, atol=1e-14))

    def __repr__(self):
        return f"SchurSymbol({self.descriptor!r})"

    def __str__(self):
        return self.descriptor

    def __eq__(self, other):
        return isinstance(other, SchurSymbol) and other.descriptor == self.descriptor

    def __hash__(self):
        return hash(self.descriptor)

    def validate(self):
        """Sanity net: maps a 1e4-point grid of ``|z| <= 0.999`` into the disk, and is non-constant."""
        r = np.linspace(0.0, VALIDATION_RADIUS, 100)
        t = np.linspace(-np.pi, np.pi, 100, endpoint=False)
        z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
        w = self._eval(z)
        if not np.all(np.isfinite(w)):
            raise DomainError(f"{self.descriptor}: non-finite values on the validation grid")
        if np.max(np.abs(w)) >= 1.0:
            raise DomainError(f"{self.descriptor} does not map the disk into itself")
        if np.max(np.abs(w - w[0])) < 1e-14:
            raise DomainError(f"{self.descriptor} is constant")
        return self


def cauchy_coefficients(f, N: int, tol: float = 1e-8) -> np.ndarray:
    """Taylor coefficients ``0..N`` of ``f`` via the FFT of samples on two circles.

    Radii are chosen so that ``r^-N`` stays at 10 and sqrt(10); with at least
    ``32 N`` nodes the aliasing error of a bounded function is below 1e-16.
    """
    M = 1 << int(np.ceil(np.log2(max(256, 32 * N))))
    k = np.arange(N + 1)
    out = []
    for expo in (1.0, 0.5):
        r = 10.0 ** (-expo / N)
        z = r * np.exp(2j * np.pi * np.arange(M) / M)
        c = np.fft.fft(f(z))[: N + 1] / M
        out.append(c * r ** (-k.astype(float)))
    c0, c1 = out
    scale = max(np.max(np.abs(c1)), 1e-300)
    err = np.max(np.abs(c0 - c1)) / scale
    if err > tol:
        raise NumericalError(f"Cauchy integral disagrees across radii (relative {err:.3e})", (c0, c1))
    return c1


# --------------------------------------------------------------------------
# builtin symbols


class Identity(SchurSymbol):
    kind = "identity"
    automorphism = True

    def _eval(self, z):
        return z.copy()

    def _deriv(self, z):
        return np.ones_like(z)

    def _sharp(self, z):
        return np.ones(z.shape)

    def _inverse(self, w):
        return w.copy()

    def _taylor_closed(self, N, dtype):
        c = np.zeros(N + 1, dtype=dtype)
        c[1] = 1
        return c

    @property
    def descriptor(self):
        return "identity"


@dataclass(frozen=True, eq=False, repr=False)
class Shrink(SchurSymbol):
    c: complex
    kind = "shrink"

    def __post_init__(self):
        c = complex(self.c)
        if not 0 < abs(c) <= 1:
            raise DomainError(f"shrink factor must satisfy 0 < |c| <= 1, got {c}")
        object.__setattr__(self, "c", c)

    @property
    def automorphism(self):
        return abs(self.c) == 1

    def _eval(self, z):
        return self.c * z

    def _deriv(self, z):
        return np.full(z.shape, self.c)

    def _inverse(self, w):
        z = w / self.c
        if np.any(np.abs(z) > 1 + BOUNDARY_TOL):
            raise DomainError("point outside the image of shrink")
        return z

    def _taylor_closed(self, N, dtype):
        c = np.zeros(N + 1, dtype=dtype)
        c[1] = self.c
        return c

    @property
    def descriptor(self):
        return f"shrink:{_fmt(self.c)}"


@dataclass(frozen=True, eq=False, repr=False)
class Affine(SchurSymbol):
    """``z -> a + b z`` with ``|a| + |b| <= 1``."""

    a: complex
    b: complex
    kind = "affine"

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if b == 0:
            raise DomainError("affine symbol with b = 0 is constant")
        if abs(a) + abs(b) > 1 + BOUNDARY_TOL:
            raise DomainError(f"affine({a}, {b}) does not map the disk into itself")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def _eval(self, z):
        return self.a + self.b * z

    def _deriv(self, z):
        return np.full(z.shape, self.b)

    def _inverse(self, w):
        z = (w - self.a) / self.b
        if np.any(np.abs(z) > 1 + BOUNDARY_TOL):
            raise DomainError("point outside the image of the affine map")
        return z

    def _taylor_closed(self, N, dtype):
        c = np.zeros(N + 1, dtype=dtype)
        c[0] = self.a
        c[1] = self.b
        return c

    @property
    def descriptor(self):
        return f"affine:{_fmt(self.a)},{_fmt(self.b)}"


@dataclass(frozen=True, eq=False, repr=False)
class Mobius(SchurSymbol):
    """Involutive automorphism ``Phi_a(z) = (a - z) / (1 - conj(a) z)``."""

    a: complex
    kind = "mobius"
    automorphism = True

    def __post_init__(self):
        a = complex(self.a)
        if not abs(a) < 1:
            raise DomainError(f"mobius parameter must lie in the open disk, got {a}")
        object.__setattr__(self, "a", a)

    def _eval(self, z):
        return (self.a - z) / (1.0 - np.conj(self.a) * z)

    def _deriv(self, z):
        return (abs(self.a) ** 2 - 1.0) / (1.0 - np.conj(self.a) * z) ** 2

    def _sharp(self, z):
        return np.ones(z.shape)

    def _inverse(self, w):
        return self._eval(w)

    def _taylor_closed(self, N, dtype):
        # a - (1 - |a|^2) z sum_k (conj(a) z)^k
        a = np.asarray(self.a, dtype=dtype)
        ca = np.conj(a)
        c = np.empty(N + 1, dtype=dtype)
        c[0] = a
        c[1:] = (a * ca - 1) * ca ** np.arange(N)
        return c

    @property
    def descriptor(self):
        return f"mobius:{_fmt(self.a)}"


def _cayley(z):
    return (1.0 - z) / (1.0 + z)


@dataclass(frozen=True, eq=False, repr=False)
class Lens(SchurSymbol):
    """Lens map ``T o tau_theta o T`` with ``T(z) = (1-z)/(1+z)`` and ``tau_theta(w) = w^theta``."""

    theta: float
    kind = "lens"

    def __post_init__(self):
        th = float(self.theta)
        if not 0 < th < 1:
            raise DomainError(f"lens parameter must lie in (0, 1), got {th}")
        object.__setattr__(self, "theta", th)

    def _eval(self, z):
        out = np.empty_like(z)
        minus = np.abs(z + 1.0) < 1e-300
        zz = z[~minus]
        w = _cayley(zz)
        out[~minus] = _cayley(w**self.theta)
        out[minus] = -1.0
        return out

    def _deriv(self, z):
        th = self.theta
        w = _cayley(z)
        u = w**th
        # T'(x) = -2 / (1 + x)^2
        return (-2.0 / (1.0 + u) ** 2) * (th * u / w) * (-2.0 / (1.0 + z) ** 2)

    def _sharp(self, z):
        # theta cos t / cos(theta t) with t = arg T(z)
        t = np.angle(_cayley(z))
        return self.theta * np.cos(t) / np.cos(self.theta * t)

    def _inverse(self, w):
        v = _cayley(w)
        if np.any(np.abs(np.angle(v)) > self.theta * np.pi / 2 + 1e-12):
            raise DomainError("point outside the lens image")
        return _cayley(v ** (1.0 / self.theta))

    @property
    def descriptor(self):
        return f"lens:{_fmt(self.theta)}"


@dataclass(frozen=True, eq=False, repr=False)
class BlaschkePower(SchurSymbol):
    """``Phi_a^m``: an inner function of degree ``m``."""

    a: complex
    m: int
    kind = "blaschke"

    def __post_init__(self):
        a = complex(self.a)
        if not abs(a) < 1:
            raise DomainError(f"zero must lie in the open disk, got {a}")
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"power must be a positive integer, got {self.m}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "m", int(self.m))

    @property
    def automorphism(self):
        return self.m == 1

    def _eval(self, z):
        return Mobius(self.a)._eval(z) ** self.m

    def _deriv(self, z):
        mob = Mobius(self.a)
        return self.m * mob._eval(z) ** (self.m - 1) * mob._deriv(z)

    def _sharp(self, z):
        # m |u|^(m-1) (1-|u|^2) / (1-|u|^(2m)) with the geometric sum cancelled
        s = np.abs(Mobius(self.a)._eval(z)) ** 2
        geo = np.zeros(z.shape)
        for j in range(self.m):
            geo += s**j
        return self.m * np.sqrt(s) ** (self.m - 1) / geo

    def _inverse(self, w):
        if self.m == 1:
            return Mobius(self.a)._eval(w)
        raise DomainError(f"{self.descriptor} is not univalent")

    def _taylor_closed(self, N, dtype):
        from ._kernels import cauchy_powers

        c = Mobius(self.a)._taylor_closed(N, dtype)
        return cauchy_powers(c, self.m + 1)[:, self.m]

    @property
    def descriptor(self):
        return f"blaschke:{_fmt(self.a)},{self.m}"


class Composed(SchurSymbol):
    """``parts[0] o parts[1] o ... o parts[-1]`` (the first part is applied last)."""

    kind = "compose"

    def __init__(self, parts: Sequence[SchurSymbol]):
        parts = tuple(parts)
        if not parts:
            raise DomainError("empty composition")
        self.parts = parts

    @property
    def automorphism(self):
        return all(p.automorphism for p in self.parts)

    def _chain(self, z):
        vals = [z]
        for p in reversed(self.parts):
            vals.append(p._eval(vals[-1]))
        return vals  # vals[i] is the input to parts[-1-i]

    def _eval(self, z):
        return self._chain(z)[-1]

    def _deriv(self, z):
        vals = self._chain(z)
        d = np.ones_like(z)
        for i, p in enumerate(reversed(self.parts)):
            d = d * p._deriv(vals[i])
        return d

    def _sharp(self, z):
        vals = self._chain(z)
        s = np.ones(z.shape)
        for i, p in enumerate(reversed(self.parts)):
            s = s * p._sharp(vals[i])
        return s

    def _inverse(self, w):
        for p in self.parts:
            w = p._inverse(w)
        return w

    def _taylor_closed(self, N, dtype):
        if all(isinstance(p, (Identity, Shrink, Affine)) for p in self.parts):
            # affine maps compose into an affine map
            a, b = 0j, 1 + 0j
            for p in reversed(self.parts):
                pa, pb = (0j, 1 + 0j) if isinstance(p, Identity) else ((0j, p.c) if isinstance(p, Shrink) else (p.a, p.b))
                a, b = pa + pb * a, pb * b
            c = np.zeros(N + 1, dtype=dtype)
            c[0], c[1] = a, b
            return c
        return None

    @property
    def descriptor(self):
        return "compose:[" + ";".join(p.descriptor for p in self.parts) + "]"


class Conjugated(Composed):
    """``psi = Phi_{phi(a)} o phi o Phi_a``, so that ``psi(0) = 0`` and ``|psi'(0)| = phi^#(a)``."""

    kind = "conj"

    def __init__(self, inner: SchurSymbol, a, check_tol: float = 1e-10):
        a = complex(a)
        if not abs(a) < 1:
            raise DomainError(f"base point must lie in the open disk, got {a}")
        self.inner = inner
        self.a = a
        super().__init__([Mobius(complex(inner(a))), inner, Mobius(a)])
        psi0 = abs(complex(self(0.0)))
        d0 = abs(complex(self.derivative(0.0)))
        target = float(inner.sharp(a))
        if psi0 > check_tol or abs(d0 - target) > check_tol:
            raise ConsistencyError(
                f"conjugation check failed: |psi(0)| = {psi0:.3e}, |psi'(0)| = {d0!r} vs phi^#(a) = {target!r}"
            )

    @property
    def descriptor(self):
        return f"conj:{self.inner.descriptor}@{_fmt(self.a)}"


# --------------------------------------------------------------------------
# constructors


def identity() -> SchurSymbol:
    return Identity().validate()


def shrink(c) -> SchurSymbol:
    return Shrink(c).validate()


def affine(a, b) -> SchurSymbol:
    return Affine(a, b).validate()


def mobius(a) -> SchurSymbol:
    return Mobius(a).validate()


def lens(theta) -> SchurSymbol:
    return Lens(theta).validate()


def blaschke_power(a, m) -> SchurSymbol:
    return BlaschkePower(a, m).validate()


def composed(parts: Sequence[SchurSymbol]) -> SchurSymbol:
    return Composed(parts).validate()


def conjugate_at(phi: SchurSymbol, a) -> SchurSymbol:
    """Move ``a`` to the origin on both sides; see :class:`Conjugated`."""
    return Conjugated(phi, a).validate()


def evaluate(phi: SchurSymbol, z):
    return phi(z)


def taylor(phi: SchurSymbol, N: int, **kw) -> CoeffSeries:
    return phi.taylor(N, **kw)


def phi_sharp(phi: SchurSymbol, z):
    return phi.sharp(z)


# --------------------------------------------------------------------------
# hyperbolic geometry


@dataclass(frozen=True)
class HyperbolicPair:
    a: complex
    b: complex
    rho: float
    d: float


def pseudo_hyperbolic(a, b):
    """``|a - b| / |1 - conj(a) b|``; vectorized."""
    a = _check_disk(a, closed=False)
    b = _check_disk(b, closed=False)
    return _unwrap(np.abs(a - b) / np.abs(1.0 - np.conj(a) * b))


def hyperbolic_d(a, b):
    rho = np.asarray(pseudo_hyperbolic(a, b))
    return _unwrap(np.arctanh(rho))


def hyperbolic_pair(a, b) -> HyperbolicPair:
    rho = float(pseudo_hyperbolic(a, b))
    return HyperbolicPair(complex(a), complex(b), rho, float(np.arctanh(rho)))


# --------------------------------------------------------------------------
# [phi] = sup phi^#


@dataclass
class BracketResult:
    value: float
    delta: float  # gain of the last refinement stage
    argmax: complex
    stages: tuple

    def __float__(self):
        return self.value


def bracket(phi: SchurSymbol, n_radial: int = 64, n_angular: int = 128, stages: int = 2,
            r_max: float = VALIDATION_RADIUS) -> BracketResult:
    """Grid supremum of ``phi^#`` with local refinement around the maximizer.

    The result is a lower estimate of ``[phi]``; ``delta`` is the increase
    produced by the final refinement stage.
    """
    if n_radial < 64 or n_angular < 128:
        raise DomainError("bracket needs at least 64 radial x 128 angular points")
    r = np.linspace(0.0, r_max, n_radial)
    t = np.linspace(-np.pi, np.pi, n_angular, endpoint=False)
    z = r[:, None] * np.exp(1j * t[None, :])
    s = phi._sharp(z)
    i, j = np.unravel_index(np.nanargmax(s), s.shape)
    best = float(s[i, j])
    r0, t0 = r[i], t[j]
    dr, dt = r[1] - r[0], t[1] - t[0]
    history = [best]
    delta = 0.0
    for _ in range(stages):
        rr = np.clip(r0 + dr * np.linspace(-1, 1, 17), 0.0, r_max)
        tt = t0 + dt * np.linspace(-1, 1, 17)
        zz = rr[:, None] * np.exp(1j * tt[None, :])
        ss = phi._sharp(zz)
        a, b = np.unravel_index(np.nanargmax(ss), ss.shape)
        new = float(ss[a, b])
        delta = max(new - best, 0.0)
        if new > best:
            best, r0, t0 = new, rr[a], tt[b]
        history.append(best)
        dr, dt = dr / 8, dt / 8
    return BracketResult(best, delta, complex(r0 * np.exp(1j * t0)), tuple(history))


# --------------------------------------------------------------------------
# boundary behaviour


@dataclass
class BoundaryContacts:
    angles: np.ndarray  # points e^{it} where |phi| reaches 1
    inner_like: bool  # |phi| = 1 on a set of positive measure of the sample


def boundary_contacts(phi: SchurSymbol, n: int = 4096, tol: float = 1e-5) -> BoundaryContacts:
    """Locate the boundary points where ``|phi(e^{it})| = 1``.

    A symbol whose boundary modulus is 1 on more than 5% of the sample is
    reported as inner-like; for the rest isolated contacts are refined by a
    bounded scalar minimization of ``1 - |phi|``. The tolerance on ``1 - |phi|``
    is loose because contacts can be cusps (``1 - |phi| ~ sqrt|t - t*|``).
    """
    if isinstance(phi, Lens):
        return BoundaryContacts(np.array([0.0, np.pi]), False)
    if isinstance(phi, (Identity, Mobius, BlaschkePower)) or (isinstance(phi, Shrink) and abs(phi.c) == 1):
        return BoundaryContacts(np.array([]), True)
    t = np.linspace(-np.pi, np.pi, n, endpoint=False)
    gap = 1.0 - np.abs(phi._eval(np.exp(1j * t)))
    if np.mean(gap < 1e-6) > 0.05:
        return BoundaryContacts(np.array([]), True)
    h = t[1] - t[0]
    cand = np.where((gap <= np.roll(gap, 1)) & (gap <= np.roll(gap, -1)) & (gap < 0.05))[0]
    found = []
    for k in cand:
        res = minimize_scalar(
            lambda s: 1.0 - abs(complex(phi._eval(np.array([np.exp(1j * s)]))[0])),
            bounds=(t[k] - h, t[k] + h),
            method="bounded",
            options={"xatol": 1e-13},
        )
        if res.fun < tol:
            a = float(np.angle(np.exp(1j * res.x)))
            if not any(abs(np.angle(np.exp(1j * (a - b)))) < 4 * h for b in found):
                found.append(a)
    return BoundaryContacts(np.array(sorted(found)), False)


def sup_norm_estimate(phi: SchurSymbol, n: int = 4096) -> float:
    """``max |phi|`` on the unit circle sample (equals the sup norm by the maximum principle, up to sampling)."""
    t = np.linspace(-np.pi, np.pi, n, endpoint=False)
    return float(np.max(np.abs(phi._eval(np.exp(1j * t)))))


# --------------------------------------------------------------------------
# lens-map helpers


def _check_theta(theta):
    theta = float(theta)
    if not 0 < theta < 1:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    return theta


def lens_gap_from_gap(theta: float, g):
    """``1 - phi_theta(r)`` from ``g = 1 - r`` (stable when ``r`` is near 1)."""
    g = np.asarray(g, dtype=float)
    return 2.0 * g**theta / ((2.0 - g) ** theta + g**theta)


def lens_boundary_gap(theta: float, r):
    """``1 - phi_theta(r) = 2(1-r)^theta / ((1+r)^theta + (1-r)^theta)`` for ``0 < r < 1``."""
    theta = _check_theta(theta)
    r = np.asarray(r, dtype=float)
    if np.any((r <= 0) | (r >= 1)):
        raise DomainError("r must lie in (0, 1)")
    return _unwrap(lens_gap_from_gap(theta, 1.0 - r))


def lens_inverse_gap(theta: float, g):
    """Gap of ``phi_theta^{-1}(r)`` on the real axis from ``g = 1 - r``."""
    # T(r) = g / (2 - g); u = T(r)^(1/theta); 1 - T(u) = 2u / (1 + u)
    u = (np.asarray(g, dtype=float) / (2.0 - np.asarray(g, dtype=float))) ** (1.0 / theta)
    return 2.0 * u / (1.0 + u)


def backward_orbit(theta: float, r1: float, n: int, tol: float = 1e-12) -> RadialSequence:
    """``r_1 < r_2 < ... < r_n`` with ``phi_theta(r_{k+1}) = r_k``.

    The recursion runs on the gaps ``1 - r_k``; each step is checked against the
    closed-form forward gap to ``tol`` (relative).
    """
    theta = _check_theta(theta)
    r1 = float(r1)
    if not 0 < r1 < 1:
        raise DomainError("r1 must lie in (0, 1)")
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    gaps = [1.0 - r1]
    for _ in range(int(n) - 1):
        g = float(lens_inverse_gap(theta, gaps[-1]))
        if g == 0.0:
            raise DomainError("backward orbit underflows double precision")
        back = float(lens_gap_from_gap(theta, g))
        if abs(back - gaps[-1]) > tol * max(gaps[-1], 1e-300) and abs(back - gaps[-1]) > tol:
            raise ConsistencyError(f"orbit identity failed: {back!r} vs {gaps[-1]!r}")
        gaps.append(g)
    return RadialSequence(np.array(gaps))


# --------------------------------------------------------------------------
# text grammar


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise DomainError(f"unbalanced brackets in {s!r}")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise DomainError(f"unbalanced brackets in {s!r}")
    out.append("".join(cur))
    return out


def _num(s: str) -> complex:
    try:
        return complex(s.strip().replace(" ", ""))
    except ValueError:
        raise DomainError(f"not a number: {s!r}") from None


def _real(s: str) -> float:
    x = _num(s)
    if x.imag != 0:
        raise DomainError(f"expected a real number, got {s!r}")
    return x.real


def parse_symbol(text: str) -> SchurSymbol:
    """Parse a symbol literal; ``str(parse_symbol(s))`` is the canonical form."""
    s = text.strip()
    if s == "identity":
        return identity()
    head, colon, rest = s.partition(":")
    if not colon:
        raise DomainError(f"unknown symbol literal {text!r}")
    if head == "shrink":
        return shrink(_num(rest))
    if head == "affine":
        args = rest.split(",")
        if len(args) != 2:
            raise DomainError("affine takes two parameters")
        return affine(_num(args[0]), _num(args[1]))
    if head == "mobius":
        return mobius(_num(rest))
    if head == "lens":
        return lens(_real(rest))
    if head == "blaschke":
        args = rest.split(",")
        if len(args) != 2:
            raise DomainError("blaschke takes a zero and a power")
        m = _real(args[1])
        if m != int(m):
            raise DomainError("blaschke power must be an integer")
        return blaschke_power(_num(args[0]), int(m))
    if head == "conj":
        pieces = _split_top(rest, "@")
        if len(pieces) < 2:
            raise DomainError("conj needs a base point: conj:<symbol>@<point>")
        return conjugate_at(parse_symbol("@".join(pieces[:-1])), _num(pieces[-1]))
    if head == "compose":
        if not (rest.startswith("[") and rest.endswith("]")):
            raise DomainError("compose takes a bracketed list: compose:[a;b]")
        parts = [parse_symbol(p) for p in _split_top(rest[1:-1], ";")]
        return composed(parts)
    raise DomainError(f"unknown symbol kind {head!r}")


def format_symbol(phi: SchurSymbol) -> str:
    return phi.descriptor
