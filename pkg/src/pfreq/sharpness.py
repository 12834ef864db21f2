"""Warped products ``dt^2 + f_eps(t)^2 g_{S^{n-1}}`` that make the diameter bound sharp.

``f_eps`` equals ``sinh t`` on ``[0, eps/2]`` (a hyperbolic cap, so the metric
is smooth at the pole) and ``delta(eps) e^{-t}`` for ``t >= eps`` (a cusp end).
In between it is glued through a smooth cutoff ``psi``:

    h = (1 - psi) coth - psi,    f(x) = sinh(eps/2) exp(int_{eps/2}^x h).

Writing ``g = coth - h = psi (coth + 1)`` gives ``f(x) = sinh(x) exp(-G(x))``
with ``G(x) = int_{eps/2}^x g``, which is how f is evaluated here.  Balls
``B(o, R_eps)`` around the pole have diameter at most D and a radial test
function built from the one-dimensional eigenfunction gives Rayleigh
quotients converging to ``lambda_bar(D, -1, n)`` as eps -> 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from . import model1d
from .errors import DomainError, ZeroDenominator
from .model1d import ModelParams
from .numerics import Tolerance, integrate

__all__ = [
    "Cutoff",
    "WarpProfile",
    "DomainSpec",
    "ConvergenceRow",
    "build_cutoff",
    "build_warp",
    "domain_spec",
    "sphere_area",
    "ricci_residual",
    "radial_ricci_residual",
    "ricci_certificate",
    "domain_integrals",
    "quotient_on_domain",
    "cap_integrals",
    "convergence_study",
]

_GL_X, _GL_W = leggauss(12)
_INT_TOL = Tolerance(rel=1e-11, abs=0.0, max_iter=200)


@dataclass(frozen=True)
class Cutoff:
    """Smooth non-decreasing step: 0 on ``[0, eps/2]``, 1 on ``[eps, inf)``.

    Built from the logistic form of the ``exp(-1/x)`` bump primitive,
    ``s(u) = 1 / (1 + exp(1/u - 1/(1-u)))`` on ``u in (0, 1)``.
    """

    epsilon: float

    def _u(self, x):
        a = 0.5 * self.epsilon
        return (np.asarray(x, dtype=float) - a) / a

    def __call__(self, x):
        u = self._u(x)
        inside = (u > 0) & (u < 1)
        ui = np.where(inside, u, 0.5)
        out = np.where(u >= 1, 1.0, np.where(inside, special.expit(1 / (1 - ui) - 1 / ui), 0.0))
        return out if out.ndim else float(out)

    def derivative(self, x):
        u = self._u(x)
        inside = (u > 0) & (u < 1)
        ui = np.where(inside, u, 0.5)
        s = special.expit(1 / (1 - ui) - 1 / ui)
        ds = s * (1 - s) * (1 / ui**2 + 1 / (1 - ui) ** 2) * (2.0 / self.epsilon)
        out = np.where(inside, ds, 0.0)
        return out if out.ndim else float(out)


def build_cutoff(epsilon):
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    return Cutoff(float(epsilon))


def sphere_area(n):
    """Area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


@dataclass(frozen=True)
class DomainSpec:
    """Ball ``B(o, R_eps)`` and the bracket ``[D_lo, D_hi]`` for its diameter."""

    R_eps: float
    D_lo: float
    D_hi: float


@dataclass
class WarpProfile:
    """The warping function f_eps and its ingredients.

    `grid` holds samples ``(x, psi, h, f, f')`` on ``[0, x_max]``; the methods
    evaluate the same quantities anywhere.
    """

    epsilon: float
    delta: float
    n: int
    D_target: float
    cutoff: Cutoff
    x_max: float
    grid: dict = field(default_factory=dict, repr=False)
    _nodes: np.ndarray = field(default=None, repr=False)
    _cumulative: np.ndarray = field(default=None, repr=False)

    @property
    def a(self):
        return 0.5 * self.epsilon

    def psi(self, x):
        return self.cutoff(x)

    def g(self, x):
        """``coth x - h(x) = psi(x)(coth x + 1)``; zero on the sinh branch."""
        x = np.asarray(x, dtype=float)
        return self.cutoff(x) * (1.0 / np.tanh(x) + 1.0)

    def g_prime(self, x):
        x = np.asarray(x, dtype=float)
        return (self.cutoff.derivative(x) * (1.0 / np.tanh(x) + 1.0)
                - self.cutoff(x) / np.sinh(x) ** 2)

    def h(self, x):
        """Logarithmic derivative f'/f."""
        x = np.asarray(x, dtype=float)
        psi = self.cutoff(x)
        return (1.0 - psi) / np.tanh(x) - psi

    def h_prime(self, x):
        x = np.asarray(x, dtype=float)
        psi = self.cutoff(x)
        dpsi = self.cutoff.derivative(x)
        return -dpsi * (1.0 / np.tanh(x) + 1.0) - (1.0 - psi) / np.sinh(x) ** 2

    def _G(self, x):
        """``int_{eps/2}^x g`` for x in [eps/2, eps] from the cumulative table."""
        nodes, cum = self._nodes, self._cumulative
        x = np.clip(x, nodes[0], nodes[-1])
        k = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, len(nodes) - 2)
        lo = nodes[k]
        half = 0.5 * (x - lo)
        mid = lo + half
        s = mid[..., None] + half[..., None] * _GL_X
        part = half * np.sum(_GL_W * self.g(s), axis=-1)
        return cum[k] + part

    def f(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.atleast_1d(x)
        out = np.empty_like(xs)
        cap = xs <= self.a
        end = xs >= self.epsilon
        mid = ~(cap | end)
        out[cap] = np.sinh(xs[cap])
        out[end] = self.delta * np.exp(-xs[end])
        out[mid] = np.sinh(xs[mid]) * np.exp(-self._G(xs[mid]))
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def f_prime(self, x):
        return self.h(x) * self.f(x)

    def domain(self):
        return domain_spec(self.delta, self.D_target)


def domain_spec(delta, D_target=2.0):
    """``R_eps = D - delta - pi*delta*exp(delta - D/2)`` and the diameter bracket ``[R_eps, D]``.

    The centre z sits at distance ``D/2 - delta`` from the pole; there the
    spheres have radius ``delta*exp(delta - D/2)``, half of whose circumference
    bounds the angular detour.  D = 2 gives ``2 - delta - pi*delta*e^(delta-1)``.
    """
    R = D_target - delta - math.pi * delta * math.exp(delta - 0.5 * D_target)
    return DomainSpec(R, R, D_target)


def build_warp(epsilon, n=2, D_target=2.0, table_size=4097, grid_size=2001):
    """Construct f_eps; delta is ``sinh(eps) exp(eps - int_{eps/2}^eps g)``."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    cutoff = build_cutoff(epsilon)
    a = 0.5 * epsilon
    nodes = np.linspace(a, epsilon, table_size)

    # Cell-wise Gauss-Legendre; g is smooth and slowly varying on each cell.
    half = 0.5 * np.diff(nodes)
    mid = nodes[:-1] + half
    s = mid[:, None] + half[:, None] * _GL_X
    g_vals = cutoff(s) * (1.0 / np.tanh(s) + 1.0)
    cells = half * np.sum(_GL_W * g_vals, axis=1)
    cumulative = np.concatenate(([0.0], np.cumsum(cells)))

    delta = math.sinh(epsilon) * math.exp(epsilon - cumulative[-1])
    dom = domain_spec(delta, D_target)
    if 0.5 * D_target - delta < epsilon:
        raise DomainError(f"epsilon={epsilon} too large for target diameter {D_target}")
    x_max = dom.R_eps + 1.0
    prof = WarpProfile(float(epsilon), delta, int(n), float(D_target), cutoff, x_max,
                       _nodes=nodes, _cumulative=cumulative)

    x = np.union1d(np.linspace(0.0, x_max, grid_size), np.linspace(a, epsilon, 201))
    x = x[x > 0]
    prof.grid = {
        "x": x,
        "psi": prof.psi(x),
        "h": prof.h(x),
        "f": prof.f(x),
        "f_prime": prof.f_prime(x),
    }
    return prof


# ---------------------------------------------------------------------------
# Curvature


def ricci_residual(profile, x, derivative="analytic"):
    """``h' + (n-1)(h^2 - 1) - (n-2)/f^2``; the Ricci bound holds where this is <= 0.

    On the cap (``x <= eps/2``) it vanishes identically and on the cusp
    (``x >= eps``) it equals ``-(n-2)/f^2``; those closed forms are returned
    there.  In the transition it is evaluated as

        -(n-2) expm1(2G)/sinh^2 - (coth+1)[psi' + psi((n-2)(coth-1) + (n-1)(h+1))]

    with ``h + 1 = (1-psi)(coth+1)``: algebraically the same expression, but
    every term has a fixed sign so rounding cannot flip the verdict.
    ``derivative="fd"`` uses the plain formula with central differences of h.
    """
    n = profile.n
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(x)
    a, eps = profile.a, profile.epsilon
    end = x >= eps
    out[end] = -(n - 2) / profile.f(x[end]) ** 2
    mid = (x > a) & ~end
    xm = x[mid]
    f = profile.f(xm)
    h = profile.h(xm)
    if derivative == "analytic":
        psi = profile.psi(xm)
        dpsi = profile.cutoff.derivative(xm)
        cp1 = 1.0 / np.tanh(xm) + 1.0
        cm1 = 2.0 / np.expm1(2.0 * xm)
        G = profile._G(xm)
        bracket = cp1 * (dpsi + psi * ((n - 2) * cm1 + (n - 1) * (1.0 - psi) * cp1))
        out[mid] = -(n - 2) * np.expm1(2.0 * G) / np.sinh(xm) ** 2 - bracket
    elif derivative == "fd":
        step = 1e-4 * eps
        hp = (profile.h(xm + step) - profile.h(xm - step)) / (2 * step)
        out[mid] = hp + (n - 1) * (h**2 - 1.0) - (n - 2) / f**2
    else:
        raise ValueError(f"unknown derivative mode {derivative!r}")
    return out


def radial_ricci_residual(profile, x):
    """``f''/f - 1 = h' + h^2 - 1``; the radial Ricci bound holds where this is <= 0.

    Equals ``-(coth+1)(psi' + psi(h+1))``, the n = 2 case of the tangential residual.
    """
    x = np.asarray(x, dtype=float)
    psi = profile.psi(x)
    cp1 = 1.0 / np.tanh(x) + 1.0
    return -cp1 * (profile.cutoff.derivative(x) + psi * (1.0 - psi) * cp1)


def ricci_certificate(profile, grid_size=10_000, derivative="analytic"):
    """Maximum of :func:`ricci_residual` over a uniform grid of ``[eps/2, eps]``."""
    if grid_size < 2:
        raise DomainError("the certificate grid needs at least two points")
    x = np.linspace(profile.a, profile.epsilon, grid_size)
    return float(np.max(ricci_residual(profile, x, derivative)))


# ---------------------------------------------------------------------------
# Rayleigh quotient of the radial test function


def _eigen_for(profile, p, solution=None):
    R = profile.domain().R_eps
    if solution is None:
        solution = model1d.eigenvalue_from_D(ModelParams(p, profile.n, -1.0, R))
    elif abs(solution.params.D - R) > 1e-12 * R or solution.params.K != -1.0:
        raise DomainError("the eigenfunction must solve the model with K=-1 and D=R_eps")
    return solution, R


def _radial_integrals(profile, p, solution, R, lo, hi):
    """``(int |w'(R-r)|^p f^{n-1}, int |w(R-r)|^p f^{n-1})`` over r in [lo, hi], without omega."""
    n = profile.n
    pieces = [(lo, min(hi, profile.a)), (max(lo, profile.a), min(hi, profile.epsilon)),
              (max(lo, profile.epsilon), hi)]
    num = den = 0.0
    for k, (u, v) in enumerate(pieces):
        if v <= u:
            continue
        if k == 2:
            # Cusp end: weight delta^{n-1} e^{-(n-1)r}, scaled out to avoid underflow.
            scale = profile.delta ** (n - 1)

            def weight(r):
                return math.exp(-(n - 1) * r)
        else:
            scale = 1.0

            def weight(r):
                return float(profile.f(r)) ** (n - 1)

        def fn(r, which):
            w, wd = solution.sample(R - r)
            return (abs(float(wd)) if which else abs(float(w))) ** p * weight(r)

        num += scale * integrate(lambda r: fn(r, 1), u, v, _INT_TOL)
        den += scale * integrate(lambda r: fn(r, 0), u, v, _INT_TOL)
    return num, den


def domain_integrals(profile, p, solution=None):
    """Full integrals ``(int |grad v|^p, int |v|^p)`` over the ball, omega_{n-1} included."""
    solution, R = _eigen_for(profile, p, solution)
    num, den = _radial_integrals(profile, p, solution, R, 0.0, R)
    omega = sphere_area(profile.n)
    return omega * num, omega * den


def quotient_on_domain(profile, p, solution=None):
    """Rayleigh quotient of ``v = w(R_eps - r)`` on ``B(o, R_eps)``: an upper bound for lambda_{1,p}."""
    num, den = domain_integrals(profile, p, solution)
    if den == 0.0:
        raise ZeroDenominator("test function integrates to zero")
    return num / den


def cap_integrals(profile, p, solution=None):
    """``(C1, C2)``: gradient and function integrals over the first eps of the ball."""
    solution, R = _eigen_for(profile, p, solution)
    num, den = _radial_integrals(profile, p, solution, R, 0.0, profile.epsilon)
    omega = sphere_area(profile.n)
    return omega * num, omega * den


@dataclass(frozen=True)
class ConvergenceRow:
    epsilon: float
    delta: float
    R_eps: float
    lower: float
    upper: float

    @property
    def gap(self):
        return self.upper - self.lower

    @property
    def bracket_ok(self):
        return self.lower <= self.upper


def convergence_row(epsilon, p, n, D_target=2.0, lower=None):
    prof = build_warp(epsilon, n, D_target)
    if lower is None:
        lower = model1d.eigenvalue_from_D(ModelParams(p, n, -1.0, D_target), profile=False).lambda_bar
    upper = quotient_on_domain(prof, p)
    return ConvergenceRow(epsilon, prof.delta, prof.domain().R_eps, lower, upper)


def convergence_study(eps_list, p=2.0, n=2, D_target=2.0):
    """One row per eps: lower bracket lambda_bar(D_target) against the quotient upper bound.

    The lower value uses the worst-case diameter D_eps = D_target.
    """
    lower = model1d.eigenvalue_from_D(ModelParams(p, n, -1.0, D_target), profile=False).lambda_bar
    return [convergence_row(e, p, n, D_target, lower) for e in eps_list]
