"""Shared fixtures and the closed-form p = 2 oracle."""
import math

import pytest
from scipy.optimize import brentq


def exact_p2(n, K, D):
    """First eigenvalue of w'' + c w' + lam w = 0, w(0) = 0, w'(D) = 0, solved by hand.

    Writing w = e^{-ct/2} v turns the problem into v'' + (lam - c^2/4) v = 0,
    so the eigenfunction is e^{-ct/2} sin(mu t) when cD < 2 and
    e^{-ct/2} sinh(kappa t) when cD > 2.  Only scipy's scalar Brent is used,
    never the package under test.
    """
    c = (n - 1) * math.sqrt(-K)
    if c == 0:
        return (math.pi / (2 * D)) ** 2
    if math.isclose(c * D, 2.0, rel_tol=0, abs_tol=1e-15):
        return c * c / 4
    if c * D < 2:
        # c sin(mu D) = 2 mu cos(mu D) on (0, pi/(2D)).
        F = lambda mu: c * math.sin(mu * D) - 2 * mu * math.cos(mu * D)  # noqa: E731
        mu = brentq(F, 1e-300, math.pi / (2 * D), xtol=1e-300, rtol=1e-15)
        return mu * mu + c * c / 4
    # tanh(kappa D) = 2 kappa / c with e = c/2 - kappa; lam = e (c - e) avoids cancellation.
    F = lambda e: e * (math.exp((c - 2 * e) * D) + 1.0) - c  # noqa: E731
    kappa = c / 4
    while F(c / 2 - kappa) <= 0:
        kappa /= 2
    e = brentq(F, 0.0, c / 2 - kappa, xtol=1e-300, rtol=1e-15)
    return e * (c - e)


@pytest.fixture
def p2_oracle():
    return exact_p2


def report(capsys, label, ok, detail):
    """Print a one-line verdict even while pytest captures output."""
    with capsys.disabled():
        print(f"\n{label}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok
