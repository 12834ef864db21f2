import math

import numpy as np
import pytest

from pfreq.errors import InvalidBracket, NonConvergence
from pfreq.numerics import Bracket, Tolerance, find_root, integrate, ode_solve, spow


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(rel=0.0)
    with pytest.raises(ValueError):
        Tolerance(abs=-1.0)
    with pytest.raises(ValueError):
        Tolerance(max_iter=0)
    assert Tolerance(1e-8, 1e-10).scaled(10) == Tolerance(1e-7, 1e-9)


def test_bracket_requires_sign_change():
    with pytest.raises(InvalidBracket):
        Bracket.around(lambda x: x * x + 1, -1.0, 1.0)
    with pytest.raises(InvalidBracket):
        Bracket(1.0, 0.0, -1.0, 1.0)
    assert Bracket.around(math.sin, 3.0, 4.0).width == 1.0


def test_find_root_matches_known_roots():
    assert abs(find_root(math.cos, (1.0, 2.0)) - math.pi / 2) < 1e-11
    tight = Tolerance(rel=1e-15)
    assert abs(find_root(math.cos, (1.0, 2.0), tight) - math.pi / 2) < 1e-15
    assert abs(find_root(lambda x: x**3 - 2, (0.0, 2.0), tight) - 2 ** (1 / 3)) < 1e-15


def test_find_root_iteration_budget():
    with pytest.raises(NonConvergence):
        find_root(lambda x: math.tanh(50 * (x - 1 / 3)), (0.0, 1.0), Tolerance(rel=1e-15, max_iter=2))


def test_integrate_polynomial_and_endpoint_singularity():
    assert abs(integrate(lambda x: x**5, 0.0, 2.0) - 64 / 6) < 1e-12
    # int_0^1 x^(-1/2) = 2
    assert abs(integrate(lambda x: x**-0.5, 0.0, 1.0) - 2.0) < 1e-10
    assert integrate(math.exp, 1.0, 1.0) == 0.0


def test_integrate_reports_failure():
    with pytest.raises(NonConvergence):
        integrate(lambda x: math.sin(1 / x) / x, 1e-6, 1.0, Tolerance(rel=1e-14, max_iter=5))


def test_ode_solve_harmonic_oscillator_with_event():
    traj = ode_solve(lambda t, y: [y[1], -y[0]], 0.0, [0.0, 1.0], 10.0,
                     Tolerance(rel=1e-12, abs=1e-14), event=lambda t, y: y[1], direction=-1)
    assert abs(traj.event_time - math.pi / 2) < 1e-10
    assert abs(traj.event_state[0] - 1.0) < 1e-10
    assert np.allclose(traj(1.0), [math.sin(1.0), math.cos(1.0)], atol=1e-8)


def test_ode_solve_budget():
    with pytest.raises(NonConvergence):
        ode_solve(lambda t, y: [math.cos(1e4 * t)], 0.0, [0.0], 100.0,
                  Tolerance(rel=1e-12, abs=1e-14, max_iter=1))


def test_spow_is_odd_and_monotone():
    x = np.linspace(-3, 3, 61)
    for q in (0.5, 1.0, 2.5):
        y = spow(x, q)
        assert np.allclose(y, -spow(-x, q))
        assert np.all(np.diff(y) > 0)
    assert spow(0.0, 0.3) == 0.0
