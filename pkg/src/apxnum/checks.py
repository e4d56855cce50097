"""Property suite: one function per acceptance criterion.

Each check returns a :class:`CheckResult` with the numbers it compared, the
elapsed time and the time budget; ``ok`` requires both the numerical test
and the budget to hold. Used by ``apxnum check`` and the acceptance tests.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import boundary_bounds as bb
from . import carleson, shift_lab, spectra, symbols
from .operator_matrix import adjoint_kernel_check


@dataclass
class CheckResult:
    number: int
    title: str
    ok: bool
    seconds: float
    limit: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"[{tag}] criterion {self.number:2d}: {self.title} ({self.seconds:.2f}s / {self.limit:g}s)"


def builtin_symbols() -> list[symbols.SchurSymbol]:
    """One representative of every builtin symbol family."""
    return [
        symbols.identity(),
        symbols.shrink(0.5),
        symbols.shrink(0.6j),
        symbols.affine(0.3, 0.4),
        symbols.mobius(0.5),
        symbols.mobius(0.3 - 0.4j),
        symbols.lens(0.25),
        symbols.lens(0.5),
        symbols.lens(0.75),
        symbols.blaschke_power(0.3, 3),
        symbols.composed([symbols.lens(0.5), symbols.shrink(0.9)]),
        symbols.conjugate_at(symbols.affine(0.3, 0.4), 0.5),
    ]


def _run(number: int, title: str, limit: float, body: Callable[[], tuple[bool, dict]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = body()
    dt = time.perf_counter() - t0
    return CheckResult(number, title, bool(ok) and dt < limit, dt, limit, detail)


def check_diagonal() -> CheckResult:
    def body():
        errs = {}
        n = np.arange(1, 21)
        for alpha in (-1.0, 0.0, 1.0):
            s = spectra.approx_numbers(symbols.shrink(0.5), alpha, 20, N=64, headroom=3)
            errs[alpha] = float(np.max(np.abs(s.values - 2.0 ** (1 - n))))
        ident = spectra.approx_numbers(symbols.identity(), -1.0, 20, N=64, headroom=3).values
        exact = bool(np.all(ident == 1.0))
        return max(errs.values()) <= 1e-8 and exact, {"max_error": errs, "identity_exact": exact}

    return _run(1, "exact diagonal spectra", 1.0, body)


def check_schwarz_pick() -> CheckResult:
    def body():
        r = np.linspace(0.0, 0.999, 100)
        t = np.linspace(-np.pi, np.pi, 1000, endpoint=False)
        z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
        worst = {}
        for phi in builtin_symbols():
            worst[phi.descriptor] = float(np.max(phi.sharp(z)))
        brackets = {th: symbols.bracket(symbols.lens(th)).value for th in (0.25, 0.5, 0.75)}
        ok = max(worst.values()) <= 1 + 1e-12 and all(abs(v - th) <= 1e-3 for th, v in brackets.items())
        return ok, {"max_sharp": worst, "lens_bracket": brackets, "grid_points": int(z.size)}

    return _run(2, "Schwarz-Pick and lens brackets", 10.0, body)


def check_secondary() -> CheckResult:
    def body():
        phi = symbols.affine(0.3, 0.4)
        s = spectra.approx_numbers(phi, -1.0, 40, N=512)
        br = symbols.bracket(phi).value
        rep = spectra.beta_estimate(s, window=(10, 40))
        n = np.arange(10, 41)
        upper_ok = bool(np.all(s.values[9:40] <= 1.5 * 0.7**n))
        ok = rep.beta_hat >= br**2 - 0.05 and upper_ok and not np.any(s.flags)
        return ok, {"beta_hat": rep.beta_hat, "bracket": br, "target": br**2 - 0.05, "upper_shape": upper_ok,
                    "flags": int(np.sum(s.flags))}

    return _run(3, "secondary lower bound for affine(0.3, 0.4)", 30.0, body)


def check_lens_sandwich(theta: float = 0.5, N: int = 2048, n_max: int = 30) -> CheckResult:
    def body():
        s = spectra.approx_numbers(symbols.lens(theta), -1.0, n_max, N=N, method="kernel")
        a = s.values
        dec = bool(np.all(np.diff(a) < 0))
        rep = spectra.beta_estimate(a, window=(1, n_max))
        shape = rep.fit_sqrt.r2 > rep.fit_exp.r2
        floors = np.array([shift_lab.lens_lower_bound(theta, n, fallback=True).floor for n in range(1, n_max + 1)])
        floor_ok = bool(np.all(floors <= a))
        n = np.arange(10, n_max + 1)
        roots = a[9:] ** (1.0 / n)
        roots_up = bool(np.all(np.diff(roots) > 0))
        ok = dec and shape and floor_ok and roots_up and not np.any(s.flags)
        return ok, {"decreasing": dec, "r2_exp": rep.fit_exp.r2, "r2_sqrt": rep.fit_sqrt.r2, "floor_ok": floor_ok,
                    "roots_increasing": roots_up, "max_stability": float(np.max(s.stability))}

    return _run(4, "lens sandwich", 300.0, body)


def check_slow_decay() -> CheckResult:
    def body():
        n = np.arange(1, 201)
        _, rep = shift_lab.slow_decay_pipeline(1.0 / np.log(n + 2.0), C0=1.0, M=200)
        c = rep["checks"]
        return c["all_pass"], c

    return _run(5, "slow-decay pipeline", 1.0, body)


def check_shift_spectra(seed: int = 0) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(100):
            m = int(rng.integers(5, 60))
            w = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            sv = np.linalg.svd(shift_lab.shift_matrix(w), compute_uv=False)[:m]
            worst = max(worst, float(np.max(np.abs(sv - np.sort(np.abs(w))[::-1]))))
        return worst <= 1e-12, {"max_error": worst}

    return _run(6, "shift spectra", 5.0, body)


def check_weyl_ideal(seed: int = 0) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        weyl_ok = True
        for _ in range(100):
            M = np.triu(rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20)))
            for k in (1, 5, 10, 20):
                weyl_ok &= spectra.weyl_check(M, k).ok
        worst_sub, worst_ideal = np.inf, np.inf
        for _ in range(100):
            A, B, C = (rng.standard_normal((12, 12)) for _ in range(3))
            m, n = (int(x) for x in rng.integers(1, 7, size=2))
            worst_sub = min(worst_sub, spectra.subadditivity_gap(A, B, m, n))
            worst_ideal = min(worst_ideal, spectra.ideal_gap(A, B, C, int(rng.integers(1, 13))))
        ok = weyl_ok and worst_sub >= -1e-12 and worst_ideal >= -1e-12
        return ok, {"weyl": bool(weyl_ok), "min_subadditivity_gap": worst_sub, "min_ideal_gap": worst_ideal}

    return _run(7, "Weyl and ideal properties", 10.0, body)


def check_carleson(samples: int = 10**6, seed: int = 0) -> CheckResult:
    def body():
        p = carleson.pushforward_profile(symbols.lens(0.5), -1.0, samples=samples, seed=seed)
        fit = carleson.profile_slope(p, 1e-3, 1e-1)
        q = carleson.pushforward_profile(symbols.shrink(0.5), -1.0, h_grid=np.geomspace(1e-3, 0.49, 12),
                                         samples=10**5, seed=seed)
        zero = bool(np.all(q.rho_hat == 0))
        return abs(fit.slope - 2.0) <= 0.2 and zero, {"slope": fit.slope, "r2": fit.r2, "shrink_zero": zero}

    return _run(8, "Carleson profile of lens(0.5)", 30.0, body)


def check_seville() -> CheckResult:
    def body():
        p = bb.seville_params(0.8)
        s_ok = abs(p.s - 0.011199) <= 1e-6
        r = np.linspace(0.0, 0.9999, 100)
        t = np.linspace(-np.pi, np.pi, 100, endpoint=False)
        z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
        sup = float(np.max(np.abs(bb.seville_f(p, z))))
        x = np.geomspace(1e-12, p.r, 4000)
        chi = np.real(bb.seville_chi(p, x))
        modulus = float(np.max(np.abs(np.abs(bb.seville_f(p, x)) - p.s)))
        span = float(chi[0] - chi[-1])
        wind_ok = bool(np.all(np.diff(chi) < 0)) and abs(span - 2 * np.pi) <= 1e-9 and modulus <= 1e-15
        sp = bb.restriction_spectrum(p, -1.0, 24)
        certified = ~sp.flags
        floors = np.array(sp.meta["floors"])
        floor_ok = bool(np.all(sp.values[certified] >= floors[certified]))
        svals = [bb.seville_params(rr).s for rr in (0.9, 0.99, 0.999)]
        mono = svals[0] < svals[1] < svals[2]
        ok = s_ok and sup <= 1 + 1e-12 and wind_ok and floor_ok and mono and certified.sum() > 0
        return ok, {"s": p.s, "sup_f": sup, "span": span, "certified": int(certified.sum()),
                    "min_ratio_to_floor": float(np.min(sp.values[certified] / floors[certified])), "s_grid": svals}

    return _run(9, "strip-map floors", 30.0, body)


def check_sandwich(seed: int = 0) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        u = np.sort(rng.uniform(0.0, 1.0, size=(10**4, 2)), axis=1)
        ok_pairs = True
        for a, b in u:
            if a == b:
                continue
            lo, mid, hi = shift_lab.poincare_sandwich(a, b)
            ok_pairs &= lo <= mid <= hi
        hp = shift_lab.hoffman_product(0.5, 60)
        hf = shift_lab.hadlac_floor(0.5)
        ok = ok_pairs and abs(hp - 0.01467) <= 1e-4 and hp >= hf
        return ok, {"pairs": bool(ok_pairs), "hoffman": hp, "hadlac": hf}

    return _run(10, "sandwich and floor formulas", 1.0, body)


def check_adjoint() -> CheckResult:
    def body():
        rng = np.random.default_rng(1)
        pts = 0.5 * np.sqrt(rng.uniform(size=4)) * np.exp(2j * np.pi * rng.uniform(size=4))
        pts = np.concatenate([pts, [0.5, -0.5j]])
        worst = {}
        for phi in builtin_symbols():
            worst[phi.descriptor] = max(adjoint_kernel_check(phi, alpha, a, N=128)
                                        for alpha in (-1.0, 0.0) for a in pts)
        return max(worst.values()) <= 1e-6, {"max_residual": worst}

    return _run(11, "kernel adjoint identity", 5.0, body)


def check_bound_evaluators() -> CheckResult:
    def body():
        tern = carleson.ternary_upper_bound(100, -1.0, lambda h: h**2).value
        sup = carleson.supper_bound(8, -1.0, lambda h: h**2)
        gamma = carleson.imprecise_gamma(-1.0, 3.0)
        p_star = carleson.schatten_threshold(-1.0, 3.0)
        parts = {
            "ternary": abs(tern - 0.217) <= 0.005,
            "supper": abs(sup - 0.1353) <= 1e-4,
            "gamma": gamma == 1.0,
            "p_star": p_star == 2.0,
        }
        return all(parts.values()), {"ternary": tern, "supper": sup, "gamma": gamma, "p_star": p_star,
                                     "parts": parts}

    return _run(12, "bound evaluators", 1.0, body)


ALL_CHECKS = [
    check_diagonal,
    check_schwarz_pick,
    check_secondary,
    check_lens_sandwich,
    check_slow_decay,
    check_shift_spectra,
    check_weyl_ideal,
    check_carleson,
    check_seville,
    check_sandwich,
    check_adjoint,
    check_bound_evaluators,
]
SLOW = {4}


def run_all(quick: bool = False) -> list[CheckResult]:
    out = []
    for i, fn in enumerate(ALL_CHECKS, start=1):
        if quick and i in SLOW:
            continue
        out.append(fn())
    return out
