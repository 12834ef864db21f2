"""Command line front end: ``pfreq {eigenvalue,sweep,sharpness,selftest}``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 numerical failure.  Every number is written with 12 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import __version__, model1d, sharpness
from .errors import DomainError, PFreqError
from .model1d import ModelParams
from .numerics import Tolerance

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
WORKERS_ENV = "PFREQ_WORKERS"
PRECISION = 12

CSV_COLUMNS = ("p", "n", "K", "D", "lambda_quad", "lambda_shoot", "lambda_rayleigh",
               "small_D_ref", "large_D_ref", "mckean", "spread")
SHARPNESS_COLUMNS = ("epsilon", "delta", "R_eps", "lower", "upper", "gap", "bracket_ok")
METHOD_NAMES = ("quad", "shoot", "rayleigh")


@dataclass
class SweepRecord:
    p: float
    n: int
    K: float
    D: float
    lambda_quad: Optional[float] = None
    lambda_shoot: Optional[float] = None
    lambda_rayleigh: Optional[float] = None
    small_D_ref: Optional[float] = None
    large_D_ref: Optional[float] = None
    mckean: Optional[float] = None
    spread: Optional[float] = None
    error: Optional[str] = None


def _spread(values):
    vals = [v for v in values if v is not None]
    if len(vals) < 2:
        return 0.0 if vals else None
    ref = vals[0]
    return max(abs(v - ref) for v in vals[1:]) / abs(ref)


def compute_record(p, n, K, D, methods=("quad",), tol_rel=1e-10, grid_size=4096):
    """Evaluate the requested methods plus reference columns for one parameter point."""
    params = ModelParams(p, n, K, D)
    tol = Tolerance(rel=tol_rel, abs=0.0, max_iter=model1d.QUAD_TOL.max_iter)
    rec = SweepRecord(p, params.n, K, D)
    if "quad" in methods:
        rec.lambda_quad = model1d.eigenvalue_from_D(params, tol=tol, profile=False).lambda_bar
    if "shoot" in methods:
        rec.lambda_shoot = model1d.eigenvalue_by_shooting(params, "prufer", profile=False).lambda_bar
    if "rayleigh" in methods:
        rec.lambda_rayleigh = model1d.rayleigh_min(params, grid_size)
    values = [rec.lambda_quad, rec.lambda_shoot, rec.lambda_rayleigh]
    rec.small_D_ref = model1d.asymptotic_small_D(params)
    if K < 0:
        # Bounded offset ln(lambda) + (n-1)sqrt(-K)D, taken from the first populated method.
        first = next(v for v in values if v is not None)
        rec.large_D_ref = model1d.large_D_log_offset(params, first)
        rec.mckean = model1d.mckean_bound(params)
    rec.spread = _spread(values)
    return rec


def _safe_record(job):
    p, n, K, D, methods, tol_rel, grid_size = job
    try:
        return compute_record(p, n, K, D, methods, tol_rel, grid_size)
    except PFreqError as exc:
        return SweepRecord(p, int(n), K, D, error=f"{type(exc).__name__}: {exc}")


def _workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None


def run_jobs(func, jobs):
    """Map `func` over `jobs` with a bounded process pool; results keep input order."""
    workers = min(_workers(), len(jobs)) if jobs else 1
    if workers <= 1:
        return [func(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, jobs))


# ---------------------------------------------------------------------------
# Formatting


def fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), f".{PRECISION}g")


def _jsonable(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(format(value, f".{PRECISION}g"))


def render(rows, columns, kind, meta=None):
    """Render dict rows as a table, CSV or JSON document."""
    if kind == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row.get(c)) for c in columns])
        return buf.getvalue()
    if kind == "json":
        doc = dict(meta or {})
        doc["rows"] = [{k: _jsonable(v) for k, v in row.items()} for row in rows]
        return json.dumps(doc, indent=2) + "\n"
    cells = [[fmt(row.get(c)) or "-" for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells]
    for row in rows:
        if row.get("error"):
            lines.append(f"# p={fmt(row['p'])} n={row['n']} K={fmt(row['K'])} D={fmt(row['D'])}: {row['error']}")
    return "\n".join(lines) + "\n"


def emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Argument parsing


def parse_values(text, kind=float):
    """Comma list ``a,b,c``, ``lin:start:stop:num`` or ``log:start:stop:num`` (geometric)."""
    text = str(text).strip()
    if text.startswith(("lin:", "log:")):
        mode, a, b, num = text.split(":")
        a, b, num = float(a), float(b), int(num)
        vals = np.linspace(a, b, num) if mode == "lin" else np.geomspace(a, b, num)
        return [kind(v) for v in vals]
    return [kind(v) for v in text.split(",") if v.strip()]


def parse_methods(text):
    if text == "all":
        return METHOD_NAMES
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in methods if m not in METHOD_NAMES]
    if bad or not methods:
        raise DomainError(f"methods must be a subset of {','.join(METHOD_NAMES)} or 'all', got {text!r}")
    return methods


def read_config(path):
    """``key = value`` lines; ``#`` starts a comment; keys use flag spelling."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def _common(sub):
    sub.add_argument("--format", choices=("table", "csv", "json"), default="table")
    sub.add_argument("--out", metavar="PATH", default=None)
    sub.add_argument("--tol-rel", type=float, default=1e-10, help="relative quadrature tolerance")
    sub.add_argument("--grid-size", type=int, default=4096, help="elements for Rayleigh minimization")
    sub.add_argument("--seed", type=int, default=0, help="seed for randomized perturbation checks")
    sub.add_argument("--config", metavar="FILE", default=None, help="key=value file mirroring the flags")


def _model_flags(sub, many):
    kind = str if many else float
    sub.add_argument("--p", type=kind, default="2" if many else 2.0)
    sub.add_argument("--n", type=str if many else int, default="2" if many else 2)
    sub.add_argument("--K", type=kind, default=None)
    sub.add_argument("--sqrt-minus-K", type=kind, default=None, help="sqrt(-K) instead of K")
    sub.add_argument("--D", type=kind, default="1" if many else 1.0)
    sub.add_argument("--methods", default="quad", help="comma list of quad,shoot,rayleigh or 'all'")


def build_parser():
    parser = argparse.ArgumentParser(prog="pfreq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pfreq {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    e = subs.add_parser("eigenvalue", help="lambda_bar for one (p, n, K, D)")
    _model_flags(e, many=False)
    _common(e)

    s = subs.add_parser("sweep", help="grid over p, n, K, D (comma lists, lin:a:b:k, log:a:b:k)")
    _model_flags(s, many=True)
    _common(s)

    h = subs.add_parser("sharpness", help="warped-product convergence study (K = -1)")
    h.add_argument("--eps", default="1e-1,1e-2,1e-3")
    h.add_argument("--p", type=float, default=2.0)
    h.add_argument("--n", type=int, default=2)
    h.add_argument("--D-target", type=float, default=2.0)
    _common(h)

    t = subs.add_parser("selftest", help="run the invariant suite")
    _common(t)
    return parser


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        config = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(config) - known)
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(unknown)}")
        typed = {}
        for a in sub._actions:
            if a.dest in config:
                typed[a.dest] = a.type(config[a.dest]) if a.type else config[a.dest]
        sub.set_defaults(**typed)
        args = parser.parse_args(argv)
    return args


def _curvature(K, sqrt_minus_K):
    if K is not None and sqrt_minus_K is not None:
        raise DomainError("give either --K or --sqrt-minus-K, not both")
    if sqrt_minus_K is not None:
        if sqrt_minus_K < 0:
            raise DomainError(f"--sqrt-minus-K must be >= 0, got {sqrt_minus_K}")
        return -sqrt_minus_K * sqrt_minus_K
    return -1.0 if K is None else K


# ---------------------------------------------------------------------------
# Commands


def cmd_eigenvalue(args):
    K = _curvature(args.K, args.sqrt_minus_K)
    methods = parse_methods(args.methods)
    ModelParams(args.p, args.n, K, args.D)
    rec = compute_record(args.p, args.n, K, args.D, methods, args.tol_rel, args.grid_size)
    emit(render([asdict(rec)], CSV_COLUMNS, args.format, {"command": "eigenvalue"}), args.out)
    return EXIT_OK, [rec]


def sweep_jobs(args):
    ps = parse_values(args.p)
    ns = parse_values(args.n, int)
    if args.sqrt_minus_K is not None:
        if args.K is not None:
            raise DomainError("give either --K or --sqrt-minus-K, not both")
        Ks = [-s * s for s in parse_values(args.sqrt_minus_K)]
    else:
        Ks = parse_values(args.K) if args.K is not None else [-1.0]
    Ds = parse_values(args.D)
    if not (ps and ns and Ks and Ds):
        raise DomainError("every sweep range must be non-empty")
    methods = parse_methods(args.methods)
    jobs = []
    for p, n, K, D in itertools.product(ps, ns, Ks, Ds):
        ModelParams(p, n, K, D)
        jobs.append((p, n, K, D, methods, args.tol_rel, args.grid_size))
    return jobs


def cmd_sweep(args):
    records = run_jobs(_safe_record, sweep_jobs(args))
    rows = [asdict(r) for r in records]
    emit(render(rows, CSV_COLUMNS, args.format, {"command": "sweep"}), args.out)
    failed = [r for r in records if r.error]
    for r in failed:
        print(f"pfreq: point p={r.p} n={r.n} K={r.K} D={r.D} failed: {r.error}", file=sys.stderr)
    return (EXIT_NUMERIC if failed else EXIT_OK), records


def _sharpness_row(job):
    eps, p, n, D_target, lower = job
    return sharpness.convergence_row(eps, p, n, D_target, lower)


def cmd_sharpness(args):
    eps_list = parse_values(args.eps)
    if not eps_list or any(e <= 0 for e in eps_list):
        raise DomainError("--eps must list positive values")
    ModelParams(args.p, args.n, -1.0, args.D_target)
    lower = model1d.eigenvalue_from_D(ModelParams(args.p, args.n, -1.0, args.D_target),
                                      profile=False).lambda_bar
    rows = run_jobs(_sharpness_row, [(e, args.p, args.n, args.D_target, lower) for e in eps_list])
    out = [dict(epsilon=r.epsilon, delta=r.delta, R_eps=r.R_eps, lower=r.lower, upper=r.upper,
                gap=r.gap, bracket_ok=r.bracket_ok) for r in rows]
    meta = {"command": "sharpness", "p": args.p, "n": args.n, "K": -1.0, "D_target": args.D_target}
    emit(render(out, SHARPNESS_COLUMNS, args.format, meta), args.out)
    bad = [r for r in rows if not r.bracket_ok]
    for r in bad:
        print(f"pfreq: bracket violated at eps={r.epsilon}: lower {r.lower} > upper {r.upper}",
              file=sys.stderr)
    return (EXIT_CHECK if bad else EXIT_OK), rows


def cmd_selftest(args):
    from .selftest import run_checks

    checks = run_checks(tol_rel=args.tol_rel, seed=args.seed)
    rows = [dict(check=c.name, passed=c.passed, value=c.value, limit=c.limit,
                 seconds=round(c.seconds, 3), detail=c.detail) for c in checks]
    emit(render(rows, ("check", "passed", "value", "limit", "seconds", "detail"), args.format,
                {"command": "selftest", "all_passed": all(c.passed for c in checks)}), args.out)
    return (EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK), checks


COMMANDS = {
    "eigenvalue": cmd_eigenvalue,
    "sweep": cmd_sweep,
    "sharpness": cmd_sharpness,
    "selftest": cmd_selftest,
}


def main(argv=None):
    try:
        args = parse_args(argv)
        code, _ = COMMANDS[args.command](args)
        return code
    except DomainError as exc:
        print(f"pfreq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PFreqError as exc:
        print(f"pfreq: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"pfreq: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
