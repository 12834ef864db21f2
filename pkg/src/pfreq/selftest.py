"""Invariant suite behind ``pfreq selftest``.

Each check returns the worst observed residual and the limit it is held to.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from . import gentrig, model1d, sharpness
from .model1d import ModelParams
from .numerics import Tolerance

P_GRID = (1.5, 2.0, 3.0)
N_GRID = (2, 3, 5)
D_GRID = (0.5, 2.0, 10.0)


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    seconds: float = 0.0
    detail: str = ""


def _matrix():
    return [ModelParams(p, n, -1.0, D) for p, n, D in itertools.product(P_GRID, N_GRID, D_GRID)]


def _quad(params, tol_rel=1e-10):
    tol = Tolerance(rel=tol_rel, abs=0.0, max_iter=model1d.QUAD_TOL.max_iter)
    return model1d.eigenvalue_from_D(params, tol=tol, profile=False).lambda_bar


def check_trig_identity():
    rng = np.random.default_rng(1)
    worst = 0.0
    for p in (1.2, 1.5, 2.0, 3.0, 5.0):
        t = rng.uniform(-2 * gentrig.pi_p(p), 2 * gentrig.pi_p(p), 1000)
        s, c = gentrig.sincos_p(p, t)
        worst = max(worst, float(np.max(np.abs(np.abs(s) ** p + np.abs(c) ** p - 1.0))))
    return worst, 1e-10


def check_trig_classical():
    t = np.linspace(-10.0, 10.0, 1000)
    s, c = gentrig.sincos_p(2.0, t)
    worst = max(np.max(np.abs(s - np.sin(t))), np.max(np.abs(c - np.cos(t))),
                abs(gentrig.pi_p(2.0) - np.pi))
    return float(worst), 1e-10


def check_closed_form(tol_rel):
    worst = 0.0
    for p, n, D in itertools.product(P_GRID, N_GRID, D_GRID):
        params = ModelParams(p, n, 0.0, D)
        exact = (p - 1) * (gentrig.pi_p(p) / (2 * D)) ** p
        worst = max(worst, abs(_quad(params, tol_rel) / exact - 1.0))
    return worst, 1e-12


def check_cross_method(tol_rel):
    worst = 0.0
    for params in _matrix():
        q = _quad(params, tol_rel)
        for kind in ("prufer", "direct"):
            s = model1d.eigenvalue_by_shooting(params, kind, profile=False).lambda_bar
            worst = max(worst, abs(s - q) / q)
    return worst, 1e-6


def check_rayleigh_bracket(tol_rel):
    # Signed excess of the discrete minimum over the quadrature value; must lie in [-1e-9, 1e-3].
    excess = []
    for params in _matrix():
        q = _quad(params, tol_rel)
        excess.append((model1d.rayleigh_min(params, 4096) - q) / q)
    lo, hi = min(excess), max(excess)
    return (hi if lo >= -1e-9 else lo), 1e-3


def check_perturbation(tol_rel, seed):
    """Quotient of the eigenfunction plus random admissible bumps never drops below lambda_bar."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for p, n, D in ((1.5, 2, 2.0), (2.0, 3, 0.5), (3.0, 5, 2.0)):
        params = ModelParams(p, n, -1.0, D)
        sol = model1d.eigenvalue_from_D(params, tol=Tolerance(rel=tol_rel))
        t = np.linspace(0.0, D, 2049)
        w, _ = sol.sample(t)
        for _ in range(8):
            k = rng.integers(1, 6)
            bump = rng.normal(scale=0.05) * np.sin(k * np.pi * t / D)
            worst = max(worst, (sol.lambda_bar - model1d.rayleigh_quotient(params, t, w + bump))
                        / sol.lambda_bar)
    return worst, 1e-9


def check_scaling(tol_rel):
    worst = 0.0
    solver = lambda pr: _quad(pr, tol_rel)  # noqa: E731
    for params in _matrix():
        for c in (0.5, 2.0, 10.0):
            a, b = model1d.scaling_check(params, c, solver)
            worst = max(worst, abs(a - b) / b)
    return worst, 1e-8


def small_D_slope(p=2.0, n=2, Ds=(1e-1, 1e-2, 1e-3, 1e-4), tol_rel=1e-10):
    res = []
    for D in Ds:
        params = ModelParams(p, n, -1.0, D)
        res.append(abs(_quad(params, tol_rel) - model1d.asymptotic_small_D(params)))
    return float(np.polyfit(np.log(Ds), np.log(res), 1)[0])


def large_D_fit(p, n, Ds=tuple(np.linspace(20.0, 40.0, 11)), tol_rel=1e-10):
    """(slope of ln lambda vs D, spread of ln lambda + (n-1) D) over `Ds`."""
    logs = np.array([math.log(_quad(ModelParams(p, n, -1.0, D), tol_rel)) for D in Ds])
    slope = float(np.polyfit(Ds, logs, 1)[0])
    offset = logs + (n - 1) * np.asarray(Ds)
    return slope, float(np.ptp(offset))


def check_small_D(tol_rel):
    return abs(small_D_slope(tol_rel=tol_rel) + 1.0), 0.15


def check_large_D(tol_rel):
    worst = 0.0
    for p, n in itertools.product(P_GRID, (2, 3)):
        slope, spread = large_D_fit(p, n, tol_rel=tol_rel)
        if spread >= 1.0:
            return math.inf, 0.02
        worst = max(worst, abs(slope / (1 - n) - 1.0))
    return worst, 0.02


def check_log_transform(tol_rel):
    worst = 0.0
    for p, n, D in ((1.5, 2, 2.0), (2.0, 3, 0.5), (3.0, 5, 10.0)):
        sol = model1d.eigenvalue_from_D(ModelParams(p, n, -1.0, D), tol=Tolerance(rel=tol_rel))
        coarse = model1d.log_transform_residual(sol, 1001)
        fine = model1d.log_transform_residual(sol, 4001)
        if not fine < coarse:
            return math.inf, 1e-4
        worst = max(worst, fine)
    return worst, 1e-4


def check_ricci():
    worst = -math.inf
    for eps, n in itertools.product((1e-1, 1e-2), (2, 3, 5)):
        worst = max(worst, sharpness.ricci_certificate(sharpness.build_warp(eps, n)))
    return worst, 1e-6


def check_sharpness():
    rows = sharpness.convergence_study((1e-1, 1e-2, 1e-3))
    gaps = [r.gap for r in rows]
    ok = all(r.bracket_ok for r in rows) and all(a > b for a, b in zip(gaps, gaps[1:]))
    rel = rows[-1].gap / rows[-1].lower
    return (rel if ok else math.inf), 0.02


def run_checks(tol_rel=1e-10, seed=0):
    """Run every check; exceptions count as failures with the message kept in ``detail``."""
    plan = [
        ("trig_identity", check_trig_identity),
        ("trig_classical", check_trig_classical),
        ("closed_form_K0", lambda: check_closed_form(tol_rel)),
        ("cross_method_spread", lambda: check_cross_method(tol_rel)),
        ("rayleigh_upper_bound", lambda: check_rayleigh_bracket(tol_rel)),
        ("perturbation_minimality", lambda: check_perturbation(tol_rel, seed)),
        ("scaling_law", lambda: check_scaling(tol_rel)),
        ("small_D_slope", lambda: check_small_D(tol_rel)),
        ("large_D_slope", lambda: check_large_D(tol_rel)),
        ("log_transform_residual", lambda: check_log_transform(tol_rel)),
        ("ricci_certificate", check_ricci),
        ("sharpness_gap", check_sharpness),
    ]
    out = []
    for name, fn in plan:
        start = time.perf_counter()
        try:
            value, limit = fn()
            out.append(Check(name, value, limit, bool(value <= limit),
                             time.perf_counter() - start))
        except Exception as exc:  # a crashing check is a failed check
            out.append(Check(name, math.inf, math.nan, False, time.perf_counter() - start,
                             f"{type(exc).__name__}: {exc}"))
    return out
