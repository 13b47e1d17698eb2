import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pleatlab.errors import ConfigurationError, DomainError
from pleatlab.formulas import smoothing_radius, tangency_radius
from pleatlab.hyperboloid import HPoint, dist
from pleatlab.smoothing import (
    CALIBRATED_C,
    boundary_position,
    build_profile,
    curvature_profile,
    decay_sweep,
    exp_map,
    hyperbolic_speed,
    length_decrease,
    supporting_geodesic_check,
    wedge_width_numeric,
)

O = HPoint([0.0, 0.0, 1.0])


# -- profile construction ----------------------------------------------------------


def test_right_angle_profile():
    p = build_profile(math.pi / 2, 1.0)
    assert p.R == pytest.approx(1.0, abs=1e-15)
    assert p.center[0] == 0.0
    assert np.hypot(*p.center) == pytest.approx(math.sqrt(2), abs=1e-15)


@pytest.mark.parametrize("theta", [1.0, 2.0, 3.0])
def test_junctions(theta):
    p = build_profile(theta, 0.5)
    c0, c1 = p.junction_errors()
    assert c0 < 1e-12
    assert c1 < 1e-10


@given(theta=st.floats(0.05, math.pi - 1e-6), r=st.floats(1e-3, 2.0))
def test_junctions_property(theta, r):
    p = build_profile(theta, r)
    c0, c1 = p.junction_errors()
    assert c0 < 1e-12 * max(1.0, r)
    assert c1 < 1e-10


@given(theta=st.floats(0.05, math.pi - 1e-6), r=st.floats(1e-3, 2.0))
def test_arc_inside_disk(theta, r):
    p = build_profile(theta, r, samples=64)
    s = np.linspace(0.0, p.arc_euclidean_length, 66)[1:-1]
    assert np.all(np.hypot(*p.arc_point(s).T) < r)


def test_radius_matches_formula():
    for theta in (0.5, 1.5, 2.5, 3.1):
        assert build_profile(theta, 0.7).R == pytest.approx(smoothing_radius(0.7, theta), rel=1e-15)


def test_degenerate_profile():
    p = build_profile(math.pi, 0.5)
    assert p.degenerate
    assert math.isinf(p.R)
    assert p.arc_euclidean_length == pytest.approx(1.0)
    assert length_decrease(p).ratio == pytest.approx(1.0)


def test_converges_to_line():
    prev = math.inf
    for gap in (1e-1, 1e-2, 1e-3, 1e-4):
        p = build_profile(math.pi - gap, 0.5, samples=64)
        pts = p.arc_point(np.linspace(0.0, p.arc_euclidean_length, 64))
        off = np.max(np.abs(pts[:, 1]))
        assert off <= 0.5 * math.cos((math.pi - gap) / 2) + 1e-15
        assert off < prev
        prev = off
    assert prev < 1e-4


def test_bad_inputs():
    with pytest.raises(DomainError):
        build_profile(2.0, 0.0)
    with pytest.raises(ConfigurationError):
        build_profile(2.0, 0.5, samples=8)


@given(x=st.floats(-3, 3), y=st.floats(-3, 3))
def test_exp_map_radial_isometry(x, y):
    q = HPoint(exp_map(np.array([x, y])))
    assert dist(O, q) == pytest.approx(math.hypot(x, y), abs=1e-12)


def test_speed_at_origin_and_radially():
    assert hyperbolic_speed(np.zeros(2), np.array([0.6, 0.8]))[0] == pytest.approx(1.0)
    z = np.array([1.0, 0.0])
    assert hyperbolic_speed(z, np.array([1.0, 0.0]))[0] == pytest.approx(1.0)
    assert hyperbolic_speed(z, np.array([0.0, 1.0]))[0] == pytest.approx(math.sinh(1.0))


# -- curvature -----------------------------------------------------------------------


@pytest.mark.parametrize("theta", [1.0, 2.0, 2.8, 3.1])
def test_rays_are_geodesic(theta):
    rep = curvature_profile(build_profile(theta, 0.5))
    assert rep.ray_sup < 1e-8


def test_near_straight_bound():
    p = build_profile(math.pi - 1e-3, 0.5)
    rep = curvature_profile(p)
    assert rep.sup_curvature < 2.0 / p.R


@pytest.mark.parametrize("theta", [1.0, 2.0, 2.5, 3.0, 3.1])
@pytest.mark.parametrize("r", [0.01, 0.1, 0.5])
def test_flat_oracle(theta, r):
    p = build_profile(theta, r)
    rep = curvature_profile(p, flat=True)
    assert np.max(np.abs(rep.kappa - 1.0 / p.R)) <= 1e-9 * max(1.0, 1.0 / p.R)


def test_report_sup_is_max():
    rep = curvature_profile(build_profile(2.2, 0.4, samples=101))
    assert rep.sup_curvature == np.max(rep.kappa)
    assert len(rep.samples) == 101


def test_flat_limit():
    for theta in (2.0, 2.5, 3.0):
        p = build_profile(theta, 0.01)
        assert curvature_profile(p).sup_curvature * p.R == pytest.approx(1.0, rel=0.05)


def test_calibration_constant():
    worst = 0.0
    for theta in np.linspace(2.0, math.pi - 1e-4, 8):
        for r in (0.01, 0.1, 0.25, 0.5):
            p = build_profile(float(theta), r, samples=401)
            worst = max(worst, curvature_profile(p).sup_curvature * p.R)
    assert worst <= CALIBRATED_C
    # one significant figure, rounded up
    assert math.ceil(worst) == CALIBRATED_C


def test_decay_examples():
    sweep = decay_sweep(0.5, [2.6, 2.8, 3.0, 3.1])
    vals = [k for _, k in sweep]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 2.0 / (0.5 * math.tan(1.55))
    assert 2.0 / (0.5 * math.tan(1.55)) == pytest.approx(0.0832, abs=1e-4)


def test_decay_reaches_eta():
    thetas = [2.5, 2.8, 3.0, 3.1, 3.13, 3.14]
    vals = [k for _, k in decay_sweep(0.5, thetas, samples=401)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.01
    p = build_profile(thetas[-1], 0.5)
    assert vals[-1] < CALIBRATED_C / p.R


def test_decay_grid_must_increase():
    with pytest.raises(ConfigurationError):
        decay_sweep(0.5, [3.0, 2.0])


# -- length ------------------------------------------------------------------------


def test_length_right_angle():
    p = build_profile(math.pi / 2, 0.5)
    assert p.arc_euclidean_length == pytest.approx(0.5 * math.pi / 2)
    rep = length_decrease(p)
    assert rep.corner_len == 1.0
    assert rep.arc_len < 1.0 and rep.strict
    # hyperbolic speed >= Euclidean speed in normal coordinates
    assert rep.arc_len >= p.arc_euclidean_length


def test_length_near_straight():
    rep = length_decrease(build_profile(3.1, 0.5))
    assert 0.99 < rep.ratio < 1.0


def test_length_ratio_tends_to_one():
    ratios = [length_decrease(build_profile(t, 0.5)).ratio for t in (2.0, 2.5, 3.0, 3.1, 3.14)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert all(x < 1.0 for x in ratios)
    assert ratios[-1] > 0.9999


@given(theta=st.floats(0.1, math.pi - 1e-3), r=st.floats(0.01, 1.5))
@settings(max_examples=30)
def test_strict_decrease_property(theta, r):
    assert length_decrease(build_profile(theta, r, samples=64)).strict


# -- supporting geodesics ----------------------------------------------------------


def test_boundary_position_distance():
    for eps, d in ((0.1, 0.5), (0.3, 2.0), (0.05, 4.0)):
        s = boundary_position(eps, d)
        res = supporting_geodesic_check(2.0, eps, s)
        assert res.dist_to_vertex == pytest.approx(d, abs=1e-10)
    with pytest.raises(DomainError):
        boundary_position(0.3, 0.2)


def test_support_passes_beyond_tangency():
    r = tangency_radius(2.0, 0.1)
    res = supporting_geodesic_check(2.0, 0.1, boundary_position(0.1, r + 0.05))
    assert res.passed
    assert res.witness is None


def test_support_fails_near_vertex():
    r = tangency_radius(2.0, 0.1)
    res = supporting_geodesic_check(2.0, 0.1, boundary_position(0.1, 0.3 * r))
    assert not res.passed
    assert res.witness_ray == 2
    assert res.witness is not None
    assert dist(res.witness, res.p) > 1e-6


@pytest.mark.parametrize("theta", [0.5, 2.0, 3.0])
@pytest.mark.parametrize("convex", [True, False])
def test_single_ray_always_passes(theta, convex):
    for s in (0.0, 0.01, 0.1, 0.5, 1.0, 3.0):
        assert supporting_geodesic_check(theta, 0.1, s, convex_side=convex, second_ray=False).passed


@pytest.mark.parametrize("theta", [1.0, 2.0, 2.8])
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3])
def test_support_grid_certificate(theta, eps):
    r = tangency_radius(theta, eps)
    for factor in (1.001, 1.01, 1.1, 1.5, 2.0, 4.0):
        s = boundary_position(eps, r * factor)
        for convex in (True, False):
            assert supporting_geodesic_check(theta, eps, s, convex_side=convex).passed


@given(theta=st.floats(0.3, 3.0), eps=st.floats(0.02, 0.5), factor=st.floats(1.001, 3.0))
@settings(max_examples=25)
def test_support_property(theta, eps, factor):
    s = boundary_position(eps, tangency_radius(theta, eps) * factor)
    assert supporting_geodesic_check(theta, eps, s).passed


def test_support_domain():
    with pytest.raises(DomainError):
        supporting_geodesic_check(math.pi, 0.1, 1.0)
    with pytest.raises(DomainError):
        supporting_geodesic_check(2.0, 0.0, 1.0)


# -- wedge width -------------------------------------------------------------------


def test_wedge_width_examples():
    assert wedge_width_numeric(math.pi / 2) == pytest.approx(math.acosh(math.sqrt(2)), abs=1e-8)
    assert wedge_width_numeric(math.pi / 2) == pytest.approx(0.881374, abs=1e-6)
    assert wedge_width_numeric(2 * math.pi / 3) == pytest.approx(math.acosh(2 / math.sqrt(3)), abs=1e-8)
    assert wedge_width_numeric(math.pi - 1e-6) < 1e-5


@given(theta=st.floats(0.05, math.pi - 1e-4))
def test_wedge_width_closed_form(theta):
    assert wedge_width_numeric(theta) == pytest.approx(math.acosh(1 / math.sin(theta / 2)), abs=1e-8)
