"""Approximation numbers, decay rates and eigenvalue-based lower bounds.

On a Hilbert space the approximation numbers of an operator are its singular
values. ``approx_numbers`` picks a discretization (Taylor matrix for symbols
with ``sup|phi| < 1`` or inner-like symbols, kernel Nystrom matrix for symbols
touching the circle), reruns it at half the size, and flags every index whose
value moved by more than the stability tolerance.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundViolation,
    ConfigurationError,
    DegenerateInputError,
    DomainError,
    InsufficientDataError,
    NumericalError,
    PreconditionError,
)
from .extended import jacobi_singular_values
from .operator_matrix import OperatorMatrix, gram_matrix, kernel_gram, taylor_matrix
from .symbols import SchurSymbol, boundary_contacts, bracket

EXTENDED_TRIGGER = 1e-12  # a_n / a_1 below this switches the Taylor path to extended precision
KERNEL_FLOOR = 1e-7  # a_n / a_1 below this is unreliable from an eigenvalue problem in double
MAX_EXTENDED_SIZE = 256


@dataclass
class SingularSpectrum:
    values: np.ndarray
    trunc_degree: int
    stability: np.ndarray = None  # relative change between the size-N and size-N/2 runs
    flags: np.ndarray = None  # True where the value is not reported
    method: str = "svd"
    precision: str = "double"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = self.values.size
        if self.stability is None:
            self.stability = np.zeros(n)
        if self.flags is None:
            self.flags = np.zeros(n, dtype=bool)
        self.stability = np.asarray(self.stability, dtype=float)
        self.flags = np.asarray(self.flags, dtype=bool)

    def __len__(self):
        return self.values.size

    @property
    def n_stable(self) -> int:
        """Length of the leading run of unflagged values."""
        bad = np.nonzero(self.flags)[0]
        return int(bad[0]) if bad.size else len(self)

    def stable_values(self) -> np.ndarray:
        return self.values[: self.n_stable]

    def reported(self) -> np.ndarray:
        """Values with flagged indices replaced by NaN."""
        out = self.values.copy()
        out[self.flags] = np.nan
        return out

    def to_csv(self, path):
        write_spectrum_csv(self, path)


@dataclass
class Fit:
    slope: float
    intercept: float
    r2: float


@dataclass
class DecayReport:
    beta_hat: float
    fit_exp: Fit
    fit_sqrt: Fit
    window: tuple
    spread: tuple  # (min, max) of a_n^(1/n) on the window
    monotone: bool


# --------------------------------------------------------------------------
# singular values of a matrix


def _svd_values(M: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc


def _gram_values(G: np.ndarray) -> np.ndarray:
    try:
        ev = np.linalg.eigvalsh(G)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    return np.sqrt(np.clip(ev[::-1], 0.0, None))


def singular_values(M, extended: bool | str = False) -> SingularSpectrum:
    """Sorted singular values of a matrix or :class:`OperatorMatrix`.

    Gram and kernel matrices are positive semidefinite and return square roots
    of their eigenvalues. ``extended=True`` runs a one-sided Jacobi SVD in
    ``np.longdouble``; this only pays off when the entries themselves were
    formed in extended precision. ``extended="auto"`` does so when some value
    falls below ``1e-13 a_1``.
    """
    method = "svd"
    if isinstance(M, OperatorMatrix):
        method = M.method
        N = M.trunc_degree
        A = M.entries
    else:
        A = np.asarray(M)
        N = A.shape[1] - 1
    if A.ndim != 2 or not np.all(np.isfinite(A)):
        raise DomainError("singular_values needs a finite matrix")
    if method in ("gram", "kernel"):
        return SingularSpectrum(_gram_values(A), N, method=method)
    ext = A.dtype in (np.longdouble, np.clongdouble) if extended == "auto" else bool(extended)
    if extended == "auto" and not ext:
        sv = _svd_values(A.astype(np.complex128) if np.iscomplexobj(A) else A.astype(float))
        if sv.size and sv[-1] < 1e-13 * sv[0]:
            ext = True
        else:
            return SingularSpectrum(sv, N, method=method)
    if ext:
        dt = np.clongdouble if np.iscomplexobj(A) else np.longdouble
        sv = jacobi_singular_values(A.astype(dt))
        return SingularSpectrum(sv.astype(float), N, method=method, precision="extended")
    return SingularSpectrum(_svd_values(A), N, method=method)


# --------------------------------------------------------------------------
# approximation numbers of C_phi


def choose_method(phi: SchurSymbol) -> str:
    """``taylor`` unless ``phi`` touches the circle at isolated points, then ``kernel``."""
    c = boundary_contacts(phi)
    if c.inner_like or c.angles.size == 0:
        return "taylor"
    return "kernel"


def _reduced_size(M: np.ndarray, tau: float) -> int:
    """Smallest K such that dropping rows and columns beyond K changes at most ``tau`` in norm."""
    A = np.abs(M) ** 2
    n = A.shape[0]
    col_tail = np.concatenate([np.cumsum(A.sum(axis=0)[::-1])[::-1], [0.0]])
    # row tail restricted to the kept columns is bounded by the full row tail
    row_tail = np.concatenate([np.cumsum(A.sum(axis=1)[::-1])[::-1], [0.0]])
    tails = np.sqrt(col_tail[1:] + row_tail[1:])
    ok = np.nonzero(tails <= tau)[0]
    return int(ok[0]) if ok.size else n - 1


def _taylor_run(phi, alpha, N):
    M = taylor_matrix(phi, alpha, N).entries
    return M, _svd_values(M)


def approx_numbers(phi: SchurSymbol, alpha: float, n_max: int, N: int | None = None, method: str = "auto",
                   precision: str = "auto", stability_tol: float = 0.05, headroom: float = 4.0) -> SingularSpectrum:
    """``a_1 .. a_{n_max}`` of ``C_phi`` on the space with index ``alpha``.

    ``N`` is the truncation degree (Taylor/Gram) or node count (kernel) and must
    leave headroom ``n_max <= N/headroom`` (default ``N/4``). Indices whose value changes by more than
    ``stability_tol`` (relative) between sizes ``N`` and ``N/2``, or that lie
    below the working-precision floor, are flagged.
    """
    if int(n_max) != n_max or n_max < 1:
        raise ConfigurationError("n_max must be a positive integer")
    n_max = int(n_max)
    if method == "auto":
        method = choose_method(phi)
    if method not in ("taylor", "gram", "kernel"):
        raise ConfigurationError(f"unknown method {method!r}")
    if N is None:
        N = 512 if method == "taylor" else 2048 if method == "kernel" else 256
    N = int(N)
    if n_max > N / headroom:
        raise ConfigurationError(f"headroom rule violated: n_max = {n_max} > N/{headroom:g} = {N / headroom:g}")
    meta: dict = {"alpha": float(alpha), "symbol": phi.descriptor}
    prec = "double"
    floor_flags = np.zeros(n_max, dtype=bool)

    if method == "taylor":
        M, sv = _taylor_run(phi, alpha, N)
        _, sv_half = _taylor_run(phi, alpha, N // 2)
        a = sv[:n_max].copy()
        half = sv_half[:n_max]
        stab = np.abs(a - half) / np.where(a > 0, a, 1.0)
        low = a < EXTENDED_TRIGGER * a[0]
        if np.any(low) and precision in ("auto", "extended"):
            tau = 1e-20 * a[0]
            K = max(_reduced_size(M, tau), n_max + 1)
            if K <= min(MAX_EXTENDED_SIZE, N // 2):
                Me = taylor_matrix(phi, alpha, K, extended=True).entries
                ext = jacobi_singular_values(Me).astype(float)
                # Weyl: truncating at K moves every value by at most tau
                a[low] = ext[:n_max][low]
                stab[low] = tau / np.maximum(a[low], 1e-300)
                noise = 64 * np.finfo(np.longdouble).eps * np.sqrt(np.sum(np.abs(Me.astype(complex)) ** 2))
                floor_flags = a < max(noise, 10 * tau)
                prec = "extended"
                meta["extended_size"] = K
            else:
                floor_flags = low
                meta["extended_skipped"] = f"reduced size {K} exceeds limit"
        elif np.any(low):
            floor_flags = low
    elif method == "kernel":
        sv = _gram_values(kernel_gram(phi, alpha, N).entries)
        sv_half = _gram_values(kernel_gram(phi, alpha, N // 2).entries)
        a = sv[:n_max]
        half = sv_half[:n_max]
        stab = np.abs(a - half) / np.where(a > 0, a, 1.0)
        floor_flags = a < KERNEL_FLOOR * a[0]
    else:
        sv = _gram_values(gram_matrix(phi, alpha, N, tol=None).entries)
        sv_half = _gram_values(gram_matrix(phi, alpha, N // 2, tol=None).entries)
        a = sv[:n_max]
        half = sv_half[:n_max]
        stab = np.abs(a - half) / np.where(a > 0, a, 1.0)
        floor_flags = a < KERNEL_FLOOR * a[0]

    flags = (stab > stability_tol) | floor_flags
    return SingularSpectrum(a, N, stab, flags, method, prec, meta)


def transpose_check(M) -> float:
    """``max |a_n(M) - a_n(M^T)|``; zero up to rounding since ``a_n(T) = a_n(T^*)``."""
    A = np.asarray(M)
    return float(np.max(np.abs(_svd_values(A) - _svd_values(A.T))))


# --------------------------------------------------------------------------
# decay rate


def _fit(x, y) -> Fit:
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return Fit(float(slope), float(intercept), r2)


def beta_estimate(s, window: tuple | None = None, min_values: int = 8) -> DecayReport:
    """Finite-sample proxy for ``liminf a_n^(1/n)``.

    ``beta_hat`` is the minimum of ``a_n^(1/n)`` over the window (1-based,
    inclusive); the default window is the second half of the stable values.
    Regressions of ``log a_n`` on ``n`` and on ``sqrt(n)`` are included.
    """
    vals = s.stable_values() if isinstance(s, SingularSpectrum) else np.asarray(s, dtype=float)
    if vals.size < min_values:
        raise InsufficientDataError(f"need at least {min_values} stable values, have {vals.size}")
    if window is None:
        window = (max(1, (vals.size + 1) // 2), vals.size)
    lo, hi = int(window[0]), int(window[1])
    if lo < 1 or hi > vals.size or hi - lo + 1 < 2:
        raise InsufficientDataError(f"window {window} not covered by {vals.size} stable values")
    n = np.arange(lo, hi + 1, dtype=float)
    a = vals[lo - 1 : hi]
    if np.any(a <= 0):
        raise InsufficientDataError("nonpositive values in the window")
    roots = a ** (1.0 / n)
    d = np.diff(roots)
    monotone = bool(np.all(d >= 0) or np.all(d <= 0))
    la = np.log(a)
    beta = float(np.clip(np.min(roots), 0.0, 1.0))
    return DecayReport(beta, _fit(n, la), _fit(np.sqrt(n), la), (lo, hi),
                       (float(np.min(roots)), float(np.max(roots))), monotone)


# --------------------------------------------------------------------------
# eigenvalues, Weyl, floors


@dataclass
class EigenvalueSequence:
    values: np.ndarray
    degenerate: bool = False

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.values.size

    def __getitem__(self, i):
        return self.values[i]


def eigenvalue_sequence(psi: SchurSymbol, n: int) -> EigenvalueSequence:
    """``psi'(0)^k`` for ``k = 0 .. n-1``: the eigenvalues of ``C_psi`` when ``psi(0) = 0``."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    p0 = complex(psi(0.0))
    if abs(p0) > 1e-12:
        raise PreconditionError(f"psi(0) = {p0} is not 0")
    d = complex(psi.derivative(0.0))
    if abs(abs(d) - 1.0) <= 1e-12:
        raise PreconditionError("|psi'(0)| = 1: psi is a rotation and C_psi is not compact")
    if d == 0:
        warnings.warn("psi'(0) = 0: only the eigenvalue 1 is nonzero", stacklevel=2)
        v = np.zeros(int(n), dtype=complex)
        v[0] = 1
        return EigenvalueSequence(v, True)
    k = np.arange(int(n))
    return EigenvalueSequence(d**k, False)


@dataclass
class WeylResult:
    lhs: float
    rhs: float
    ok: bool
    log_lhs: float
    log_rhs: float


def weyl_check(M, n: int) -> WeylResult:
    """``prod_{k<=n} a_k(M) >= prod_{k<=n} |lambda_k(M)|`` with eigenvalues sorted by modulus.

    The comparison allows each computed singular value its backward-error
    slack ``8 dim eps a_1``; at ``n = dim`` both sides equal ``|det M|``.
    """
    A = np.asarray(M)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("weyl_check needs a square matrix")
    if not 1 <= n <= A.shape[0]:
        raise DomainError("n out of range")
    sv = _svd_values(A)[:n]
    try:
        lam = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    lam = np.sort(np.abs(lam))[::-1][:n]
    # computed singular values carry absolute error up to ~ dim * eps * ||A||
    slack = 8 * A.shape[0] * np.finfo(float).eps * sv[0]
    with np.errstate(divide="ignore"):
        ll = float(np.sum(np.log(sv)))
        lr = float(np.sum(np.log(lam)))
        ll_up = float(np.sum(np.log(sv + slack)))
    ok = bool(lr == -np.inf or ll_up >= lr + np.log1p(-1e-10))
    return WeylResult(float(np.prod(sv)), float(np.prod(lam)), ok, ll, lr)


def subadditivity_gap(A, B, m: int, n: int) -> float:
    """``a_m(A) + a_n(B) - a_{m+n-1}(A+B)``; nonnegative for any matrices of equal shape."""
    A, B = np.asarray(A), np.asarray(B)
    if A.shape != B.shape:
        raise DomainError("shapes differ")
    k = min(A.shape)
    if m < 1 or n < 1 or m + n - 1 > k:
        raise DomainError("indices out of range")
    return float(_svd_values(A)[m - 1] + _svd_values(B)[n - 1] - _svd_values(A + B)[m + n - 2])


def ideal_gap(A, B, C, n: int) -> float:
    """``||A|| a_n(B) ||C|| - a_n(ABC)``; nonnegative by the ideal property."""
    A, B, C = (np.asarray(x) for x in (A, B, C))
    P = A @ B @ C
    if not 1 <= n <= min(P.shape):
        raise DomainError("n out of range")
    return float(np.linalg.norm(A, 2) * _svd_values(B)[n - 1] * np.linalg.norm(C, 2) - _svd_values(P)[n - 1])


def lemma_second_floor(delta: float, r: float, norm_T: float, n: int) -> float:
    """``(delta^2 / ||T||) r^(2n)``: the floor implied by ``|lambda_n| >= delta r^n``."""
    if delta <= 0 or norm_T <= 0 or not 0 < r <= 1 or n < 1:
        raise DomainError("need delta > 0, ||T|| > 0, 0 < r <= 1, n >= 1")
    return float(delta**2 / norm_T * r ** (2 * n))


def eigen_floor_parameters(psi: SchurSymbol) -> tuple[float, float]:
    """``(delta, r)`` with ``|lambda_n| = delta r^n`` for the eigenvalues of ``C_psi`` (n >= 1)."""
    seq = eigenvalue_sequence(psi, 2)
    if seq.degenerate:
        raise DegenerateInputError("psi'(0) = 0 gives no geometric eigenvalue floor")
    r = abs(complex(seq.values[1]))
    return 1.0 / r, r


@dataclass
class SecondaryReport:
    kappa: float
    bracket: float
    c_kappa: float
    beta_hat: float
    window: tuple
    ok: bool


def secondary_lower_bound(phi: SchurSymbol, kappa: float, s: SingularSpectrum, bracket_value: float | None = None,
                          window: tuple | None = None, tol: float = 0.02) -> SecondaryReport:
    """Check ``a_n >= c_kappa kappa^(2n)`` with the best constant on the stable window.

    Raises :class:`BoundViolation` if ``c_kappa`` is not positive or the decay
    proxy falls below ``kappa^2 - tol``.
    """
    b = float(bracket(phi).value) if bracket_value is None else float(bracket_value)
    if not 0 < kappa < b:
        raise PreconditionError(f"kappa = {kappa} must lie in (0, [phi]) with [phi] >= {b}")
    vals = s.stable_values()
    if window is None:
        window = (1, vals.size)
    lo, hi = window
    if hi > vals.size:
        raise InsufficientDataError(f"window {window} exceeds {vals.size} stable values")
    n = np.arange(lo, hi + 1)
    a = vals[lo - 1 : hi]
    with np.errstate(divide="ignore"):
        logc = np.log(a) - 2 * n * np.log(kappa)
    c = float(np.exp(np.min(logc)))
    rep = beta_estimate(vals, window) if hi - lo + 1 >= 2 and vals.size >= 8 else None
    beta = rep.beta_hat if rep else float("nan")
    ok = c > 0 and (rep is None or beta >= kappa**2 - tol)
    report = SecondaryReport(float(kappa), b, c, beta, (lo, hi), bool(ok))
    if not ok:
        raise BoundViolation(f"geometric floor violated: c_kappa = {c}, beta_hat = {beta}, kappa^2 = {kappa**2}")
    return report


# --------------------------------------------------------------------------
# export


def write_spectrum_csv(s: SingularSpectrum, path) -> None:
    """Columns ``n, a_n, stability, a_n^(1/n), flagged``; ``path`` may be an open text stream."""
    if hasattr(path, "write"):
        _write_spectrum_rows(s, path)
    else:
        with open(path, "w", newline="") as fh:
            _write_spectrum_rows(s, fh)


def _write_spectrum_rows(s: SingularSpectrum, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "a_n", "stability", "a_n^(1/n)", "flagged"])
    for i, (a, st, f) in enumerate(zip(s.values, s.stability, s.flags), start=1):
        shown = float("nan") if f else a
        root = shown ** (1.0 / i) if shown > 0 else float("nan")
        w.writerow([i, repr(float(shown)), repr(float(st)), repr(float(root)), int(f)])
