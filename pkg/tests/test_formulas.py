import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from pleatlab.errors import BracketError, ConfigurationError, DomainError
from pleatlab.formulas import (
    SPHERE_AREA,
    TubeQuery,
    WedgeParams,
    ball_volume,
    hull_width,
    inversion_r,
    lambert_leg,
    right_triangle_hypotenuse,
    smoothing_radius,
    tangency_radius,
    tube_width,
)

thetas = st.floats(0.05, math.pi - 0.05)
epsilons = st.floats(0.01, 2.0)


def test_sphere_areas_against_gamma():
    for n, area in SPHERE_AREA.items():
        assert math.isclose(area, 2 * math.pi ** (n / 2) / math.gamma(n / 2), rel_tol=1e-15)


def test_inversion_involution_log_grid():
    for x in np.logspace(-3, 1, 41):
        assert abs(inversion_r(inversion_r(x)) - x) <= 1e-12 * max(1.0, x)


def test_inversion_examples():
    assert abs(inversion_r(inversion_r(0.7)) - 0.7) < 1e-12
    assert 0 < inversion_r(20.0) < 1e-8
    assert inversion_r(700.5) > 0
    assert inversion_r(745.0) > 0
    with pytest.raises(DomainError):
        inversion_r(800.0)
    with pytest.raises(DomainError):
        inversion_r(0.0)


def test_inversion_fixed_point():
    lo, hi = 0.5, 1.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if inversion_r(mid) > mid:
            lo = mid
        else:
            hi = mid
    assert abs(0.5 * (lo + hi) - math.log(1 + math.sqrt(2))) < 1e-10


@given(st.floats(1e-3, 30.0), st.floats(1e-3, 30.0))
def test_inversion_strictly_decreasing(a, b):
    if a < b:
        assert inversion_r(a) > inversion_r(b) or inversion_r(a) == inversion_r(b) == 0


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("rho", [0.0, 0.01, 0.5, 0.99, 1.0, 2.5, 6.0])
def test_ball_volume_matches_quadrature(n, rho):
    ref = SPHERE_AREA[n] * quad(lambda t: math.sinh(t) ** (n - 1), 0, rho, epsabs=0, epsrel=1e-13)[0]
    assert math.isclose(ball_volume(n, rho), ref, rel_tol=1e-10, abs_tol=1e-300)


def test_ball_volume_closed_forms():
    for rho in (0.1, 1.0, 3.0):
        assert math.isclose(ball_volume(1, rho), 2 * rho, rel_tol=1e-15)
        assert math.isclose(ball_volume(2, rho), 2 * math.pi * (math.cosh(rho) - 1), rel_tol=1e-12)
    assert ball_volume(3, 0.0) == 0.0


def test_ball_volume_rejects():
    with pytest.raises(ConfigurationError):
        ball_volume(9, 1.0)
    with pytest.raises(DomainError):
        ball_volume(2, -1.0)


@given(st.integers(1, 8), st.floats(0.0, 5.0), st.floats(1e-3, 1.0))
def test_ball_volume_increasing(n, rho, step):
    assert ball_volume(n, rho + step) > ball_volume(n, rho)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("A", [0.1, 1.0, 10.0])
def test_tube_width_round_trip(n, A):
    c = tube_width(TubeQuery(n, A))
    assert c > 0
    assert abs(ball_volume(n, inversion_r(2 * c)) - A) <= 1e-9 * max(1.0, A)


def test_tube_width_against_brentq():
    f = lambda x: ball_volume(3, inversion_r(x)) - 2.0
    assert math.isclose(tube_width(3, 2.0), 0.5 * brentq(f, 1e-6, 50.0, xtol=1e-15), rel_tol=1e-11)


def test_tube_width_monotone_and_vanishing():
    cs = [tube_width(2, A) for A in (0.01, 0.1, 1.0, 10.0, 100.0, 1e6)]
    assert all(a > b for a, b in zip(cs, cs[1:]))
    assert cs[-1] < 1e-3


def test_tube_query_validation():
    with pytest.raises(ConfigurationError):
        TubeQuery(1, 1.0)
    with pytest.raises(ConfigurationError):
        TubeQuery(9, 1.0)
    with pytest.raises(DomainError):
        TubeQuery(2, 0.0)


def test_tube_width_bracket_failure():
    with pytest.raises(BracketError):
        tube_width(2, 1e305)


def test_tangency_radius_composition_grid():
    for theta in np.linspace(0.1, math.pi - 0.1, 50):
        for eps in np.linspace(0.01, 1.0, 50):
            composed = right_triangle_hypotenuse(lambert_leg(theta, eps), eps)
            assert abs(tangency_radius(theta, eps) - composed) <= 1e-12


def test_lambert_leg_relation():
    for theta, eps in [(1.0, 0.1), (2.0, 0.5), (2.9, 1.2)]:
        q = lambert_leg(theta, eps)
        assert math.isclose(1 / math.tan(theta / 2), math.sinh(q) * math.tanh(eps), rel_tol=1e-13)


def test_tangency_radius_limit_and_bounds():
    for eps in (0.05, 0.3, 1.0):
        assert abs(tangency_radius(math.pi - 1e-9, eps) - eps) < 1e-6
    with pytest.raises(DomainError):
        tangency_radius(math.pi, 0.1)
    with pytest.raises(DomainError):
        tangency_radius(1.0, 0.0)


@given(thetas, thetas, epsilons)
def test_tangency_radius_decreasing_in_theta(t1, t2, eps):
    if t1 < t2 - 1e-9:
        assert tangency_radius(t1, eps) > tangency_radius(t2, eps)
    assert tangency_radius(t1, eps) >= eps


def test_hull_width_examples():
    assert hull_width(math.pi - 1e-9, 0.0) < 1e-4
    assert abs(hull_width(math.pi / 2, 0.0) - math.acosh(math.sqrt(2))) < 1e-15
    ref = math.acosh(math.cosh(0.2) / math.sin(math.pi / 4))
    assert abs(hull_width(math.pi / 2, 0.2) - ref) < 1e-14


@given(thetas, epsilons, st.floats(1e-3, 0.5))
def test_hull_width_monotone(theta, eps, step):
    assert hull_width(theta, eps + step) > hull_width(theta, eps)
    if theta + step < math.pi:
        assert hull_width(theta + step, eps) < hull_width(theta, eps)


def test_smoothing_radius():
    assert abs(smoothing_radius(1.0, math.pi / 2) - 1.0) < 1e-15
    assert smoothing_radius(1.0, 3.14159) > 1e4
    assert smoothing_radius(1.0, 1e-6) < 1e-6
    with pytest.raises(DomainError):
        smoothing_radius(-1.0, 1.0)


def test_wedge_params_validation():
    WedgeParams(1.0, 0.1, 0.5)
    with pytest.raises(DomainError):
        WedgeParams(0.0, 0.1, 0.5)
    with pytest.raises(DomainError):
        WedgeParams(1.0, 0.0, 0.5)
