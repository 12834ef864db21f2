"""Generalized trigonometric functions sin_p, cos_p, arcsin_p and the constant pi_p.

``arcsin_p(x) = int_0^x (1 - t^p)^(-1/p) dt``.  Substituting ``u = t^p`` turns
this into an incomplete beta function,

    arcsin_p(x) = (pi_p / 2) * I(x^p; 1/p, 1 - 1/p),

so ``sin_p`` on the first quarter period is available through the inverse
regularized incomplete beta function.  Close to ``pi_p/2`` the quantity
``sin_p^p`` is within rounding of 1, so there ``cos_p^p`` is computed directly
from the distance to the quarter period (``I(1-x; b, a) = 1 - I(x; a, b)``)
and ``sin_p`` follows from ``|sin_p|^p + |cos_p|^p = 1``.  Callers that know
that distance more accurately than ``pi_p/2 - t`` can pass it through
:func:`sincos_from_tail`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "pi_p",
    "arcsin_p",
    "sin_p",
    "cos_p",
    "sincos_p",
    "sincos_from_tail",
    "prufer_product",
    "GenTrigTable",
]


def _check_p(p):
    if not p > 1:
        raise DomainError(f"generalized trigonometric functions need p > 1, got p={p}")


def pi_p(p):
    """Half period of sin_p: ``2*pi / (p*sin(pi/p))``."""
    _check_p(p)
    return 2.0 * np.pi / (p * np.sin(np.pi / p))


def arcsin_p(p, x):
    """``int_0^x (1 - t^p)^(-1/p) dt`` for x in [0, 1] (vectorized)."""
    _check_p(p)
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        raise DomainError("arcsin_p is defined on [0, 1]")
    out = 0.5 * pi_p(p) * special.betainc(1.0 / p, 1.0 - 1.0 / p, x**p)
    return out if out.ndim else float(out)


def _quarter(p, u, tail):
    """(sin_p, cos_p) at u in [0, pi_p/2] where ``tail == pi_p/2 - u``; both >= 0."""
    a, b = 1.0 / p, 1.0 - 1.0 / p
    half = 0.5 * pi_p(p)
    y = np.clip(u / half, 0.0, 1.0)
    yc = np.clip(tail / half, 0.0, 1.0)
    near_zero = y <= 0.5
    s = np.empty_like(y)
    c = np.empty_like(y)

    sp_ = special.betaincinv(a, b, y[near_zero])
    s[near_zero] = sp_ ** a
    c[near_zero] = (1.0 - sp_) ** a

    far = ~near_zero
    cp_ = special.betaincinv(b, a, yc[far])
    c[far] = cp_ ** a
    s[far] = (1.0 - cp_) ** a
    return s, c


def _reduce(p, t):
    """Fold t into the first quarter period.

    Returns (u, tail, sin_sign, cos_sign) with u in [0, pi_p/2] and
    sin_p(t) = sin_sign*sin_p(u), cos_p(t) = cos_sign*cos_p(u).
    """
    pp = pi_p(p)
    r = np.mod(t, 2.0 * pp)
    sin_sign = np.where(r >= pp, -1.0, 1.0)
    r = np.where(r >= pp, r - pp, r)
    second = r > 0.5 * pp
    u = np.where(second, pp - r, r)
    cos_sign = np.where(second, -1.0, 1.0) * sin_sign
    return u, 0.5 * pp - u, sin_sign, cos_sign


def sincos_p(p, t):
    """``(sin_p(t), cos_p(t))`` for arbitrary real t (vectorized)."""
    _check_p(p)
    t = np.asarray(t, dtype=float)
    u, tail, ss, cs = _reduce(p, np.atleast_1d(t))
    s, c = _quarter(p, u, tail)
    s, c = ss * s, cs * c
    if t.ndim == 0:
        return float(s[0]), float(c[0])
    return s.reshape(t.shape), c.reshape(t.shape)


def sin_p(p, t):
    return sincos_p(p, t)[0]


def cos_p(p, t):
    """Derivative of sin_p, evaluated through ``|sin_p|^p + |cos_p|^p = 1`` with the quadrant sign."""
    return sincos_p(p, t)[1]


def sincos_from_tail(p, tail):
    """(sin_p, cos_p) at ``pi_p/2 - tail`` for tail in [0, pi_p/2].

    Accurate to full relative precision in cos_p even when tail is far below
    the spacing of doubles near pi_p/2.
    """
    _check_p(p)
    tail = np.asarray(tail, dtype=float)
    flat = np.atleast_1d(tail)
    s, c = _quarter(p, 0.5 * pi_p(p) - flat, flat)
    if tail.ndim == 0:
        return float(s[0]), float(c[0])
    return s.reshape(tail.shape), c.reshape(tail.shape)


def prufer_product(p, phi, tail=None):
    """``cos_p(phi)^(p-1) * sin_p(phi)`` on the first quarter period.

    If `tail` (``pi_p/2 - phi``) is given it is used instead of `phi`, which
    keeps full precision as phi approaches pi_p/2.
    """
    if tail is None and np.ndim(phi) == 0 and 0.0 <= phi:
        half = 0.5 * pi_p(p)
        if phi <= half:
            return _product_scalar(p, float(phi), half - float(phi), half)
    if tail is not None and np.ndim(tail) == 0 and 0.0 <= tail:
        half = 0.5 * pi_p(p)
        if tail <= half:
            return _product_scalar(p, half - float(tail), float(tail), half)
    if tail is None:
        s, c = sincos_p(p, phi)
    else:
        s, c = sincos_from_tail(p, tail)
    return np.sign(c) * np.abs(c) ** (p - 1) * s


def _product_scalar(p, u, tail, half):
    # Scalar fast path of prufer_product for u in [0, pi_p/2]; quadrature calls it per node.
    a = 1.0 / p
    if u <= tail:
        sp_ = float(special.betaincinv(a, 1.0 - a, u / half))
        return (1.0 - sp_) ** (1.0 - a) * sp_ ** a
    cp_ = float(special.betaincinv(1.0 - a, a, tail / half))
    return cp_ ** (1.0 - a) * (1.0 - cp_) ** a


@dataclass(frozen=True)
class GenTrigTable:
    """sin_p/cos_p/arcsin_p bound to one exponent.

    `inversion_grid` is an optional sampled ``(t, sin_p t)`` table on
    ``[0, pi_p/2]`` for export or plotting; evaluation never depends on it.
    """

    p: float
    pi_p: float = field(init=False)
    inversion_grid: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "pi_p", pi_p(self.p))

    @classmethod
    def with_grid(cls, p, num=257):
        t = np.linspace(0.0, 0.5 * pi_p(p), num)
        s = sin_p(p, t)
        t.flags.writeable = False
        s.flags.writeable = False
        return cls(p, inversion_grid=(t, s))

    def sin(self, t):
        return sin_p(self.p, t)

    def cos(self, t):
        return cos_p(self.p, t)

    def sincos(self, t):
        return sincos_p(self.p, t)

    def arcsin(self, x):
        return arcsin_p(self.p, x)

    def product(self, phi, tail=None):
        return prufer_product(self.p, phi, tail)
