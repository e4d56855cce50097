"""Command-line front end.

Every subcommand accepts ``--config FILE`` (plain ``key=value`` lines, keys as
the long option names), ``--out PATH`` and ``--format {csv,json}``; explicit
flags override the config file. ``APXNUM_SEED`` sets the default seed.

Exit codes: 0 success, 1 usage or parse error, 2 partial output (flagged
values or failed checks), 3 numerical failure.
"""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .errors import (
    ApxnumError,
    BoundViolation,
    ConfigurationError,
    ConsistencyError,
    DomainError,
    InsufficientDataError,
    NumericalError,
    PreconditionError,
)

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# config


@dataclass
class RunConfig:
    """Resolved options of an ``approx`` run; round-trips through ``key=value`` text."""

    symbol: str = "identity"
    alpha: float = -1.0
    trunc: int | None = None
    n_max: int = 10
    method: str = "auto"
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    precision: str = "auto"

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        raw = parse_config_text(text)
        kw = {}
        for f in fields(cls):
            if f.name in raw:
                v = raw[f.name]
                if f.name == "alpha":
                    v = float(v)
                elif f.name in ("trunc", "n_max", "seed"):
                    v = int(v)
                kw[f.name] = v
        unknown = set(raw) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**kw)


def parse_config_text(text: str) -> dict[str, str]:
    """``key=value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"config line {lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def default_seed() -> int:
    v = os.environ.get("APXNUM_SEED")
    if v is None or v == "":
        return 0
    try:
        return int(v)
    except ValueError as exc:
        raise UsageError(f"APXNUM_SEED must be an integer, got {v!r}") from exc


# --------------------------------------------------------------------------
# eps formulas


_ALLOWED_FUNCS = {"log": np.log, "exp": np.exp, "sqrt": np.sqrt, "log2": np.log2, "log10": np.log10}
_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load, ast.Call,
                  ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


def eps_from_formula(text: str, M: int) -> np.ndarray:
    """Evaluate a formula in ``n`` (``^`` means power) at ``n = 1..M``."""
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse eps formula {text!r}: {exc.msg}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise UsageError(f"unsupported construct in eps formula: {type(node).__name__}")
        if isinstance(node, ast.Name) and node.id != "n" and node.id not in _ALLOWED_FUNCS and node.id not in (
                "pi", "e"):
            raise UsageError(f"unknown name {node.id!r} in eps formula")
    env = {"n": np.arange(1, M + 1, dtype=float), "pi": math.pi, "e": math.e, **_ALLOWED_FUNCS}
    with np.errstate(all="ignore"):
        vals = np.broadcast_to(np.asarray(eval(compile(tree, "<eps>", "eval"), {"__builtins__": {}}, env),
                                          dtype=float), (M,)).copy()
    return vals


def eps_from_csv(path: str) -> np.ndarray:
    """Last column of each row that parses as a number; header rows are skipped."""
    vals = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                vals.append(float(row[-1]))
            except ValueError:
                continue
    return np.array(vals)


def _validate_eps(e: np.ndarray) -> None:
    if e.size == 0 or not np.all(np.isfinite(e)) or np.any(e <= 0):
        raise DomainError("eps must be finite and positive")
    if np.any(np.diff(e) > 0):
        k = int(np.nonzero(np.diff(e) > 0)[0][0]) + 2
        raise DomainError(f"eps must be nonincreasing (increase at n = {k})")


# --------------------------------------------------------------------------
# output


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _dump_json(payload: dict) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None, suffix: str | None = None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = out if suffix is None else _with_suffix(out, suffix)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _with_suffix(out: str, suffix: str) -> str:
    root, ext = os.path.splitext(out)
    return out if ext == suffix else root + suffix


def _envelope(cmd: str, args: argparse.Namespace, result: dict) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}
    return {"command": cmd, "version": __version__, "config": cfg, "result": result}


# --------------------------------------------------------------------------
# subcommands


def cmd_approx(args) -> int:
    from .spectra import approx_numbers, write_spectrum_csv
    from .symbols import parse_symbol

    phi = parse_symbol(args.symbol)
    s = approx_numbers(phi, args.alpha, args.n_max, N=args.trunc, method=args.method, precision=args.precision,
                       headroom=args.headroom)
    if args.format == "csv":
        buf = io.StringIO()
        write_spectrum_csv(s, buf)
        _emit(buf.getvalue(), args.out)
    else:
        rows = [{"n": i + 1, "a_n": None if f else float(a), "stability": float(st),
                 "root": None if f or a <= 0 else float(a) ** (1.0 / (i + 1)), "flagged": bool(f)}
                for i, (a, st, f) in enumerate(zip(s.values, s.stability, s.flags))]
        res = {"method": s.method, "precision": s.precision, "trunc": s.trunc_degree, "rows": rows, "meta": s.meta}
        _emit(_dump_json(_envelope("approx", args, res)), args.out)
    return EXIT_PARTIAL if np.any(s.flags) else EXIT_OK


def cmd_bracket(args) -> int:
    from .symbols import bracket, parse_symbol

    phi = parse_symbol(args.symbol)
    b = bracket(phi, n_radial=args.n_radial, n_angular=args.n_angular, stages=args.stages, r_max=args.r_max)
    res = {"value": b.value, "delta": b.delta, "argmax": complex(b.argmax), "stages": list(b.stages)}
    if args.format == "csv":
        _emit(f"symbol,value,delta,argmax_re,argmax_im\n{phi.descriptor},{b.value!r},{b.delta!r},"
              f"{complex(b.argmax).real!r},{complex(b.argmax).imag!r}\n", args.out)
    else:
        _emit(_dump_json(_envelope("bracket", args, res)), args.out)
    return EXIT_OK


def cmd_lens_report(args) -> int:
    from .shift_lab import lens_lower_bound
    from .spectra import approx_numbers, beta_estimate
    from .symbols import lens

    s = approx_numbers(lens(args.theta), -1.0, args.n_max, N=args.trunc, method="kernel")
    a = s.values
    rep = beta_estimate(a, window=(1, args.n_max))
    floors = [lens_lower_bound(args.theta, n, fallback=True) for n in range(1, args.n_max + 1)]
    floor_vals = np.array([f.floor for f in floors])
    verdict = "sqrt" if rep.fit_sqrt.r2 > rep.fit_exp.r2 else "exp"
    res = {
        "theta": args.theta,
        "b_theta": floors[0].b_theta,
        "rows": [{"n": i + 1, "a_n": float(a[i]), "floor": float(floor_vals[i]), "sigma": floors[i].sigma_used,
                  "tuned_sigma": floors[i].tuned, "flagged": bool(s.flags[i]), "stability": float(s.stability[i])}
                 for i in range(args.n_max)],
        "fit_exp": asdict(rep.fit_exp),
        "fit_sqrt": asdict(rep.fit_sqrt),
        "verdict": verdict,
        "floor_ok": bool(np.all(floor_vals <= a)),
    }
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a_n", "floor", "flagged"])
        for row in res["rows"]:
            w.writerow([row["n"], repr(row["a_n"]), repr(row["floor"]), int(row["flagged"])])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_dump_json(_envelope("lens-report", args, res)), args.out)
    return EXIT_PARTIAL if np.any(s.flags) or not res["floor_ok"] else EXIT_OK


def cmd_shift(args) -> int:
    from .shift_lab import slow_decay_pipeline

    if (args.eps is None) == (args.eps_file is None):
        raise UsageError("give exactly one of --eps and --eps-file")
    e = eps_from_formula(args.eps, args.m) if args.eps is not None else eps_from_csv(args.eps_file)[: args.m]
    _validate_eps(e)
    _, rep = slow_decay_pipeline(e, C0=args.c0, alpha=args.alpha)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "log10_gap", "w", "a_n", "eps", "floor"])
        for row in rep["table"]:
            w.writerow([row["n"], repr(row["log10_gap"]), repr(row["w"]), repr(row["a_n"]), repr(row["eps"]),
                        repr(row["floor"])])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_dump_json(_envelope("shift", args, rep)), args.out)
    return EXIT_OK if rep["checks"]["all_pass"] else EXIT_PARTIAL


def cmd_carleson(args) -> int:
    from .carleson import (default_h_grid, embedding_norm_bounds, profile_slope, pushforward_profile,
                           ternary_upper_bound)
    from .symbols import parse_symbol

    phi = parse_symbol(args.symbol)
    h = default_h_grid(args.h_min, args.h_max, args.h_points)
    p = pushforward_profile(phi, args.alpha, h_grid=h, samples=args.samples, seed=args.seed)
    res = {"profile": p.as_dict()}
    try:
        fit = profile_slope(p, args.h_min, args.h_max)
        res["slope"] = asdict(fit)
    except (InsufficientDataError, DomainError) as exc:
        res["slope"] = {"error": str(exc)}
    lo, hi = embedding_norm_bounds(p)
    res["embedding_norm"] = {"lower": lo, "upper": hi}
    res["ternary"] = {str(n): asdict(ternary_upper_bound(n, args.alpha, p)) for n in args.n_list}
    buf = io.StringIO()
    p.to_csv(buf)
    text_json = _dump_json(_envelope("carleson", args, res))
    if args.out is None:
        sys.stdout.write(buf.getvalue() if args.format == "csv" else text_json)
    else:
        _emit(buf.getvalue(), args.out, ".csv")
        _emit(text_json, args.out, ".json")
    return EXIT_OK


def cmd_seville(args) -> int:
    from .boundary_bounds import seville_params, seville_report

    rep = seville_report(args.r, args.alpha, args.trunc, args.precision)
    rep["s_grid"] = {repr(r): seville_params(r).s for r in args.r_grid}
    grid = [rep["s_grid"][repr(r)] for r in args.r_grid]
    rep["s_increasing"] = bool(np.all(np.diff(grid) > 0)) if len(grid) > 1 else True
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a_n", "floor", "certified"])
        for row in rep["rows"]:
            w.writerow([row["n"], repr(row["a_n"]), repr(row["floor"]), int(row["certified"])])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_dump_json(_envelope("seville", args, rep)), args.out)
    return EXIT_OK if all(r["certified"] for r in rep["rows"]) else EXIT_PARTIAL


def cmd_bounds(args) -> int:
    from .carleson import imprecise_bound, imprecise_gamma, schatten_threshold, supper_bound, ternary_upper_bound

    res = {}
    if args.kind == "ternary":
        k = args.power
        t = ternary_upper_bound(args.n, args.alpha, lambda h: args.scale * h**k)
        res = {"rho": f"{args.scale!r}*h^{k!r}", **asdict(t)}
    elif args.kind == "supper":
        k = args.power
        res = {"A": f"{args.scale!r}*h^{k!r}", "value": supper_bound(args.n, args.alpha, lambda h: args.scale * h**k)}
    else:
        res = {"gamma": imprecise_gamma(args.alpha, args.beta), "p_star": schatten_threshold(args.alpha, args.beta),
               "value": imprecise_bound(args.n, args.alpha, args.beta)}
    if args.format == "csv":
        keys = sorted(k for k, v in res.items() if not isinstance(v, (dict, list)))
        _emit(",".join(keys) + "\n" + ",".join(repr(res[k]) if isinstance(res[k], float) else str(res[k])
                                               for k in keys) + "\n", args.out)
    else:
        _emit(_dump_json(_envelope("bounds", args, res)), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_all

    results = run_all(quick=args.quick)
    lines = [r.line() for r in results]
    if args.format == "json":
        _emit(_dump_json(_envelope("check", args, {"results": [asdict(r) for r in results]})), args.out)
    else:
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(r.ok for r in results) else EXIT_PARTIAL


# --------------------------------------------------------------------------
# parser


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(sp: argparse.ArgumentParser, fmt: str = "json") -> argparse.ArgumentParser:
    sp.add_argument("--config", help="key=value file; explicit flags take precedence")
    sp.add_argument("--out", help="output path (default: stdout)")
    sp.add_argument("--format", choices=["csv", "json"], default=fmt)
    sp.add_argument("--seed", type=int, default=None, help="RNG seed (default: $APXNUM_SEED or 0)")
    return sp


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="apxnum", description="Approximation numbers of composition operators.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    a = _common(sub.add_parser("approx", help="approximation numbers a_1..a_n of C_phi"), "csv")
    a.add_argument("--symbol", required=True, help="symbol literal, e.g. lens:0.5 or shrink:0.5")
    a.add_argument("--alpha", type=float, default=-1.0)
    a.add_argument("--trunc", type=int, default=None, help="truncation degree or node count")
    a.add_argument("--n-max", type=int, default=10)
    a.add_argument("--method", choices=["auto", "taylor", "gram", "kernel"], default="auto")
    a.add_argument("--precision", choices=["auto", "double", "extended"], default="auto")
    a.add_argument("--headroom", type=float, default=4.0)
    a.set_defaults(func=cmd_approx)

    b = _common(sub.add_parser("bracket", help="grid estimate of sup phi^#"))
    b.add_argument("--symbol", required=True)
    b.add_argument("--n-radial", type=int, default=64)
    b.add_argument("--n-angular", type=int, default=128)
    b.add_argument("--stages", type=int, default=2)
    b.add_argument("--r-max", type=float, default=0.999)
    b.set_defaults(func=cmd_bracket)

    lr = _common(sub.add_parser("lens-report", help="measured lens spectrum against explicit floors"))
    lr.add_argument("--theta", type=float, default=0.5)
    lr.add_argument("--n-max", type=int, default=30)
    lr.add_argument("--trunc", type=int, default=2048)
    lr.set_defaults(func=cmd_lens_report)

    s = _common(sub.add_parser("shift", help="slow-decay shift pipeline"))
    s.add_argument("--eps", help="formula in n, e.g. '1/log(n+2)' or 'n^-0.5'")
    s.add_argument("--eps-file", help="CSV file; the last column of each row is eps_n")
    s.add_argument("--c0", type=float, default=1.0)
    s.add_argument("--m", type=int, default=200)
    s.add_argument("--alpha", type=float, default=-1.0)
    s.set_defaults(func=cmd_shift)

    c = _common(sub.add_parser("carleson", help="Monte Carlo Carleson profile of the pullback measure"))
    c.add_argument("--symbol", required=True)
    c.add_argument("--alpha", type=float, default=-1.0)
    c.add_argument("--samples", type=int, default=10**6)
    c.add_argument("--h-min", type=float, default=1e-3)
    c.add_argument("--h-max", type=float, default=1e-1)
    c.add_argument("--h-points", type=int, default=13)
    c.add_argument("--n-list", type=_int_list, default=[10, 100, 1000], help="comma-separated n for the bound")
    c.set_defaults(func=cmd_carleson)

    v = _common(sub.add_parser("seville", help="strip-map parameters and restriction spectrum"))
    v.add_argument("--r", type=float, default=0.8)
    v.add_argument("--alpha", type=float, default=-1.0)
    v.add_argument("--trunc", type=int, default=24)
    v.add_argument("--precision", choices=["auto", "double", "mp"], default="auto")
    v.add_argument("--r-grid", type=_float_list, default=[0.9, 0.99, 0.999])
    v.set_defaults(func=cmd_seville)

    bd = _common(sub.add_parser("bounds", help="closed-form bound evaluators"))
    bd.add_argument("kind", choices=["ternary", "supper", "imprecise"])
    bd.add_argument("--n", type=int, default=100)
    bd.add_argument("--alpha", type=float, default=-1.0)
    bd.add_argument("--power", type=float, default=2.0, help="exponent k in rho(h) or A(h) = scale * h^k")
    bd.add_argument("--scale", type=float, default=1.0)
    bd.add_argument("--beta", type=float, default=3.0, help="exponent for the imprecise bound")
    bd.set_defaults(func=cmd_bounds)

    ck = _common(sub.add_parser("check", help="run the property suite"), "csv")
    ck.add_argument("--quick", action="store_true", help="skip the multi-second lens criterion")
    ck.set_defaults(func=cmd_check)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known_args, _ = pre.parse_known_args(argv)
    choices = parser._subparsers._group_actions[0].choices
    if known_args.config and known_args.command in choices:
        try:
            with open(known_args.config) as fh:
                raw = parse_config_text(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        subparser = choices[known_args.command]
        actions = {act.dest: act for act in subparser._actions}
        defaults = {}
        for k, v in raw.items():
            if k not in actions or k in ("help", "config"):
                raise UsageError(f"unknown config key {k!r} for {known_args.command}")
            act = actions[k]
            if isinstance(act, argparse._StoreTrueAction):
                defaults[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    defaults[k] = act.type(v) if act.type else v
                except ValueError as exc:
                    raise UsageError(f"config {k}={v!r}: {exc}") from exc
                if act.choices is not None and defaults[k] not in act.choices:
                    raise UsageError(f"config {k}={v!r} not in {list(act.choices)}")
        subparser.set_defaults(**defaults)
        for k in defaults:
            actions[k].required = False
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("missing subcommand (see --help)")
    if args.seed is None:
        args.seed = default_seed()
    return args


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except (UsageError, ConfigurationError, DomainError, PreconditionError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, BoundViolation, ConsistencyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ApxnumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
