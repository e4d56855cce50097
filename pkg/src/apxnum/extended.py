"""Extended-precision singular values.

``jacobi_singular_values`` is a one-sided (Hestenes) Jacobi SVD that works in
any numpy floating dtype, in particular ``np.longdouble``. Jacobi methods
compute small singular values to high *relative* accuracy for well-scaled
matrices, which is what the fast-decaying spectra need. Rotations follow a
round-robin ordering so that each step updates ``K/2`` disjoint column pairs
at once with vectorized numpy operations.

``mp_eigvalsh`` wraps mpmath for small symmetric problems that need more than
extended precision.
"""
from __future__ import annotations

import numpy as np

from .errors import NumericalError


def _round_robin(k: int):
    """Pairings of ``0..k-1`` (k even) covering every pair once per sweep."""
    idx = list(range(k))
    rounds = []
    for _ in range(k - 1):
        p = np.array(idx[: k // 2])
        q = np.array(idx[k // 2 :][::-1])
        rounds.append((p, q))
        idx = [idx[0]] + [idx[-1]] + idx[1:-1]
    return rounds


def jacobi_singular_values(A, tol: float | None = None, max_sweeps: int = 60) -> np.ndarray:
    """Singular values of ``A`` (descending) by one-sided Jacobi in ``A``'s dtype.

    Values below about ``eps * ||A||_F`` are at rounding level.
    """
    A = np.array(A, copy=True)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    if A.shape[0] < A.shape[1]:
        A = A.conj().T.copy()
    m, k = A.shape
    if k == 0:
        return np.zeros(0, dtype=np.abs(A).dtype)
    real_dtype = np.abs(A[:1, :1]).dtype
    if tol is None:
        tol = float(np.finfo(real_dtype).eps) * 4
    # pre-sort columns by norm: improves convergence and the final ordering
    norms = np.sqrt(np.sum(np.abs(A) ** 2, axis=0))
    A = A[:, np.argsort(-norms.astype(float), kind="stable")]
    if k % 2:
        A = np.concatenate([A, np.zeros((m, 1), dtype=A.dtype)], axis=1)
    kk = A.shape[1]
    rounds = _round_robin(kk)
    one = real_dtype.type(1)
    # columns at rounding level (~eps ||A||) carry no information and never
    # orthogonalize; pairs below this absolute floor count as converged
    floor = (float(np.finfo(real_dtype).eps) * float(np.sqrt(np.sum(np.abs(A) ** 2)))) ** 2
    for sweep in range(max_sweeps):
        off = 0.0
        for p, q in rounds:
            ap, aq = A[:, p], A[:, q]
            alpha = np.sum(np.abs(ap) ** 2, axis=0)
            beta = np.sum(np.abs(aq) ** 2, axis=0)
            gamma = np.sum(np.conj(ap) * aq, axis=0)
            g = np.abs(gamma)
            denom = np.sqrt(alpha * beta)
            with np.errstate(divide="ignore", invalid="ignore"):
                rel = np.where(denom > 0, g / denom, 0)
            active = (rel > tol) & (g > floor)
            if not np.any(active):
                continue
            off = max(off, float(np.max(rel[active])))
            p, q = p[active], q[active]
            ap, aq = ap[:, active], aq[:, active]
            alpha, beta, gamma, g = alpha[active], beta[active], gamma[active], g[active]
            zeta = (beta - alpha) / (2 * g)
            t = np.where(zeta >= 0, one, -one) / (np.abs(zeta) + np.sqrt(one + zeta * zeta))
            c = one / np.sqrt(one + t * t)
            s = c * t
            phase = gamma / g  # unit modulus; a sign in the real case
            aq = aq * np.conj(phase)[None, :]
            new_p = c[None, :] * ap - s[None, :] * aq
            new_q = s[None, :] * ap + c[None, :] * aq
            new_q = new_q * phase[None, :]
            A[:, p] = new_p
            A[:, q] = new_q
        if off <= tol:
            # a padding column stays zero, so it sorts last
            sv = np.sqrt(np.sum(np.abs(A) ** 2, axis=0))
            return np.sort(sv)[::-1][:k]
    raise NumericalError(f"Jacobi SVD did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})")


def mp_eigvalsh(M, dps: int = 50) -> list:
    """Eigenvalues (ascending) of a real symmetric or Hermitian matrix at ``dps`` digits.

    ``M`` may hold mpmath numbers or anything mpmath can convert.
    """
    import mpmath as mp

    with mp.workdps(dps):
        A = mp.matrix(M)
        if any(mp.im(A[i, j]) != 0 for i in range(A.rows) for j in range(A.cols)):
            ev = mp.eighe(A, eigvals_only=True)
        else:
            ev = mp.eigsy(A, eigvals_only=True)
        return sorted([mp.mpf(mp.re(x)) for x in ev])
