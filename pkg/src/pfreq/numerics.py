"""Numerical kernels: adaptive quadrature, bracketed root finding, ODE stepping.

All three are thin contracts over scipy (QUADPACK, Brent's method and the
Dormand-Prince 8(5,3) pair).  The wrappers pin down tolerances, turn scipy's
soft failure flags into exceptions and give the rest of the package a single
place to change numerical back ends.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize

from .errors import InvalidBracket, NonConvergence, StepSizeUnderflow

__all__ = [
    "Tolerance",
    "Bracket",
    "Trajectory",
    "spow",
    "integrate",
    "find_root",
    "ode_solve",
]

# Smallest relative tolerances brentq and QUADPACK accept.
_BRENT_RTOL_FLOOR = 4.0 * np.finfo(float).eps
_QUAD_RTOL_FLOOR = 64.0 * np.finfo(float).eps


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-10
    abs: float = 0.0
    max_iter: int = 200

    def __post_init__(self):
        if not self.rel > 0:
            raise ValueError(f"Tolerance.rel must be > 0, got {self.rel}")
        if not self.abs >= 0:
            raise ValueError(f"Tolerance.abs must be >= 0, got {self.abs}")
        if self.max_iter < 1:
            raise ValueError(f"Tolerance.max_iter must be >= 1, got {self.max_iter}")

    def scaled(self, factor):
        """Tolerance with both rel and abs multiplied by `factor`."""
        return Tolerance(self.rel * factor, self.abs * factor, self.max_iter)


@dataclass(frozen=True)
class Bracket:
    """A sign-change interval ``[lo, hi]`` with the function values at its ends."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidBracket(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not (np.isfinite(self.f_lo) and np.isfinite(self.f_hi)):
            raise InvalidBracket("function values at the bracket ends must be finite")
        if np.sign(self.f_lo) == np.sign(self.f_hi) and self.f_lo != 0:
            raise InvalidBracket(
                f"no sign change: f({self.lo})={self.f_lo}, f({self.hi})={self.f_hi}"
            )

    @classmethod
    def around(cls, f, lo, hi):
        return cls(lo, hi, float(f(lo)), float(f(hi)))

    @property
    def width(self):
        return self.hi - self.lo


@dataclass
class Trajectory:
    """Result of :func:`ode_solve`.

    ``t``/``y`` hold the accepted steps (``y`` has shape ``(dim, len(t))``);
    ``sol`` is the dense-output interpolant over ``[t[0], t[-1]]``.
    """

    t: np.ndarray
    y: np.ndarray
    sol: Callable
    event_time: Optional[float] = None
    event_state: Optional[np.ndarray] = None
    nfev: int = 0

    @property
    def t_end(self):
        return float(self.t[-1])

    @property
    def y_end(self):
        return self.y[:, -1]

    def __call__(self, t):
        return self.sol(t)


def spow(x, q):
    """Signed power ``|x|**(q-1) * x`` with ``spow(0, q) == 0`` for every q > 0."""
    x = np.asarray(x, dtype=float)
    out = np.sign(x) * np.abs(x) ** q
    return out if out.ndim else float(out)


def integrate(f, a, b, tol=Tolerance(), points=None):
    """Adaptive Gauss-Kronrod integral of a scalar function over ``[a, b]``.

    `points` are optional interior break points (kinks, near-singular spots).
    Raises NonConvergence when the error estimate exceeds
    ``max(tol.abs, tol.rel*|I|)`` after ``tol.max_iter`` subdivisions.
    """
    if a > b:
        raise ValueError(f"integrate needs a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0
    kwargs = dict(epsabs=tol.abs, epsrel=max(tol.rel, _QUAD_RTOL_FLOOR), limit=tol.max_iter, full_output=1)
    if points is not None:
        pts = [x for x in points if a < x < b]
        if pts:
            kwargs["points"] = pts
    out = _integrate.quad(f, a, b, **kwargs)
    value, err = out[0], out[1]
    if not np.isfinite(value):
        raise NonConvergence(f"non-finite integral on [{a}, {b}]")
    target = max(tol.abs, tol.rel * abs(value))
    if len(out) > 3 and err > target:
        raise NonConvergence(
            f"quadrature on [{a}, {b}]: error estimate {err:.3e} > {target:.3e} ({out[3].splitlines()[0]})"
        )
    return value


def find_root(f, bracket, tol=Tolerance(rel=1e-12)):
    """Root of `f` inside a sign-change bracket (Brent: secant/IQI with bisection fallback).

    `bracket` may be a :class:`Bracket` or a ``(lo, hi)`` pair.
    """
    if not isinstance(bracket, Bracket):
        bracket = Bracket.around(f, *bracket)
    if bracket.f_lo == 0:
        return bracket.lo
    if bracket.f_hi == 0:
        return bracket.hi
    root, info = _optimize.brentq(
        f,
        bracket.lo,
        bracket.hi,
        xtol=max(tol.abs, 1e-300),
        rtol=max(tol.rel, _BRENT_RTOL_FLOOR),
        maxiter=tol.max_iter,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise NonConvergence(f"root finding stopped after {info.iterations} iterations: {info.flag}")
    return root


class _BudgetExceeded(Exception):
    pass


def ode_solve(rhs, t0, y0, t1, tol=Tolerance(rel=1e-9, abs=1e-12), event=None, threshold=0.0,
              direction=0, max_step=np.inf, atol=None):
    """Integrate ``y' = rhs(t, y)`` from `t0` to `t1` with local error control.

    If `event` is given, integration stops the first time the scalar
    ``event(t, y) - threshold`` changes sign (restricted to `direction` if
    nonzero); the crossing is located on the dense output.  `atol`, if
    given, overrides ``tol.abs`` (e.g. per component).  The
    right-hand-side evaluation budget is ``500 * tol.max_iter``.
    """
    if not t0 < t1:
        raise ValueError(f"ode_solve needs t0 < t1, got {t0}, {t1}")
    budget = 500 * tol.max_iter
    count = [0]

    def counted(t, y):
        count[0] += 1
        if count[0] > budget:
            raise _BudgetExceeded
        return rhs(t, y)

    events = None
    if event is not None:
        def ev(t, y):
            return event(t, y) - threshold

        ev.terminal = True
        ev.direction = direction
        events = [ev]

    try:
        res = _integrate.solve_ivp(
            counted,
            (t0, t1),
            np.atleast_1d(np.asarray(y0, dtype=float)),
            method="DOP853",
            rtol=max(tol.rel, 1e-13),
            atol=atol if atol is not None else (tol.abs if tol.abs > 0 else 1e-300),
            dense_output=True,
            events=events,
            max_step=max_step,
        )
    except _BudgetExceeded:
        raise NonConvergence(f"ODE solve exceeded {budget} right-hand-side evaluations") from None

    if res.status == -1:
        if "step size" in res.message.lower():
            raise StepSizeUnderflow(res.message)
        raise NonConvergence(res.message)

    traj = Trajectory(t=res.t, y=res.y, sol=res.sol, nfev=res.nfev)
    if event is not None and res.status == 1:
        traj.event_time = float(res.t_events[0][0])
        traj.event_state = res.y_events[0][0]
    return traj
