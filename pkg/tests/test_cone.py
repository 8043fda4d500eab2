"""
Tests for cone geometry: geodesics, transport, curvature, Killing flows and lengths.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conelab.algebras import make_algebra
from conelab.cone import (
    ConePoint,
    Tangent,
    christoffel,
    competitor_path,
    convexity_profile,
    curvature,
    curvature_bracket,
    finsler_norm,
    geodesic,
    geodesic_between,
    geodesic_velocity,
    killing_field,
    killing_flow,
    lie_velocity,
    log_map,
    mu,
    mu_star,
    parallel_transport,
    parallel_transport_ode,
    path_length,
    spray,
    thompson_distance,
    transport_curvature_check,
)
from conelab.elements import Element
from conelab.errors import DomainError
from conelab.jordan import GaugeFunction, exp, random_element, random_positive
from conelab.paths import SampledPath, second_difference, simpson

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _point(algebra, rng, scale=0.6):
    return ConePoint(random_positive(algebra, rng, scale))


# ============= Points and the symmetric-space product =============

def test_cone_point_rejects_boundary(sym2):
    with pytest.raises(DomainError):
        ConePoint(Element.from_matrix(sym2, np.diag([1.0, 0.0])))


def test_mu_in_sym_is_x_yinv_x(sym2):
    x = ConePoint(Element.from_matrix(sym2, [[2.0, 0.5], [0.5, 1.0]]))
    y = ConePoint(Element.from_matrix(sym2, np.diag([4.0, 0.5])))
    xm = x.p.to_matrix()
    expected = xm @ np.linalg.inv(y.p.to_matrix()) @ xm
    np.testing.assert_allclose(mu(x, y).to_matrix(), expected, atol=1e-12)


def test_mu_fixes_its_base_and_reflects(algebra, rng):
    x, y = _point(algebra, rng), _point(algebra, rng)
    np.testing.assert_allclose(mu(x, x).coords, x.p.coords, atol=1e-10)
    back = mu(x, ConePoint(mu(x, y)))
    np.testing.assert_allclose(back.coords, y.p.coords, atol=1e-8 * (1.0 + y.p.norm2()))


def test_mu_star_matches_finite_differences(algebra, rng):
    x, y = _point(algebra, rng), _point(algebra, rng)
    v, w = random_element(algebra, rng), random_element(algebra, rng)
    h = 1e-5
    numeric = (
        mu(ConePoint(x.p + h * v), ConePoint(y.p + h * w)).coords
        - mu(ConePoint(x.p - h * v), ConePoint(y.p - h * w)).coords
    ) / (2.0 * h)
    analytic = mu_star(Tangent(x, v), Tangent(y, w)).coords
    np.testing.assert_allclose(analytic, numeric, atol=1e-5 * (1.0 + np.linalg.norm(numeric)))


# ============= Geodesics =============

def test_geodesic_example(sym2):
    p = ConePoint.unit(sym2)
    v = Element.from_matrix(sym2, np.diag([math.log(4.0), math.log(9.0)]))
    np.testing.assert_allclose(geodesic(p, v, 0.5).p.to_matrix(), np.diag([2.0, 3.0]), atol=1e-12)


@given(seed=seeds)
def test_geodesic_solves_spray_equation(algebra, seed):
    rng = np.random.default_rng(seed)
    p, v = _point(algebra, rng), random_element(algebra, rng, 0.5)
    t, h = 0.4, 1e-4
    accel = second_difference(lambda s: geodesic(p, v, s).p.coords, t, h)
    here = geodesic(p, v, t)
    expected = spray(here, geodesic_velocity(p, v, t)).coords
    np.testing.assert_allclose(accel, expected, atol=1e-5 * (1.0 + np.linalg.norm(expected)))


def test_geodesic_velocity_matches_finite_differences(algebra, rng):
    p, v = _point(algebra, rng), random_element(algebra, rng, 0.5)
    h = 1e-5
    numeric = (geodesic(p, v, 0.3 + h).p.coords - geodesic(p, v, 0.3 - h).p.coords) / (2.0 * h)
    np.testing.assert_allclose(geodesic_velocity(p, v, 0.3).coords, numeric, atol=1e-7 * (1.0 + np.linalg.norm(numeric)))
    np.testing.assert_allclose(geodesic_velocity(p, v, 0.0).coords, v.coords, atol=1e-10)


def test_log_map_inverts_geodesic(algebra, rng):
    x, y = _point(algebra, rng), _point(algebra, rng)
    v = log_map(x, y)
    np.testing.assert_allclose(geodesic(x, v, 1.0).p.coords, y.p.coords, atol=1e-8 * (1.0 + y.p.norm2()))
    np.testing.assert_allclose(geodesic_between(x, y, 0.0).p.coords, x.p.coords, atol=1e-10)
    np.testing.assert_allclose(geodesic_between(x, y, 1.0).p.coords, y.p.coords, atol=1e-8 * (1.0 + y.p.norm2()))


def test_geodesic_midpoint_is_geometric_mean_in_sym(sym2):
    a = np.array([[2.0, 0.3], [0.3, 1.0]])
    b = np.array([[1.0, -0.4], [-0.4, 3.0]])
    mid = geodesic_between(ConePoint(Element.from_matrix(sym2, a)), ConePoint(Element.from_matrix(sym2, b)), 0.5)
    m = mid.p.to_matrix()
    # the geometric mean is the unique positive solution of M a^-1 M = b
    np.testing.assert_allclose(m @ np.linalg.inv(a) @ m, b, atol=1e-10)


def test_christoffel_polarizes_spray(algebra, rng):
    x = _point(algebra, rng)
    v, w = random_element(algebra, rng), random_element(algebra, rng)
    polarized = 0.5 * (spray(x, v + w) - spray(x, v) - spray(x, w))
    np.testing.assert_allclose(christoffel(x, v, w).coords, polarized.coords, atol=1e-9)


# ============= Transport and curvature =============

def test_parallel_transport_matches_ode(algebra, rng):
    x, y = _point(algebra, rng), _point(algebra, rng)
    w = random_element(algebra, rng)
    closed = parallel_transport(x, y, 0.7, w)
    numeric = parallel_transport_ode(x, y, 0.7, w, steps=200)
    np.testing.assert_allclose(numeric.coords, closed.coords, atol=1e-7 * (1.0 + closed.norm2()))


def test_parallel_transport_is_finsler_isometry(algebra, rng):
    x, y = _point(algebra, rng), _point(algebra, rng)
    w = random_element(algebra, rng)
    moved = parallel_transport(x, y, 1.0, w)
    assert finsler_norm(y, moved) == pytest.approx(finsler_norm(x, w), rel=1e-8)


def test_parallel_transport_at_time_zero(algebra, rng):
    x, y = _point(algebra, rng), _point(algebra, rng)
    w = random_element(algebra, rng)
    np.testing.assert_allclose(parallel_transport(x, y, 0.0, w).coords, w.coords, atol=1e-10)
    assert parallel_transport_ode(x, y, 0.0, w) is w


@given(seed=seeds)
def test_curvature_routes_agree(algebra, seed):
    rng = np.random.default_rng(seed)
    p = _point(algebra, rng)
    v, w, z = (random_element(algebra, rng) for _ in range(3))
    lhs, rhs = curvature(p, v, w, z).coords, curvature_bracket(p, v, w, z).coords
    np.testing.assert_allclose(lhs, rhs, atol=1e-8 * (1.0 + np.linalg.norm(rhs)))


def test_curvature_at_unit_is_bracket(sym3, rng):
    v, w, z = (random_element(sym3, rng) for _ in range(3))
    lv, lw = sym3.left_mult(v.coords), sym3.left_mult(w.coords)
    expected = (lv @ lw - lw @ lv) @ z.coords
    np.testing.assert_allclose(curvature(ConePoint.unit(sym3), v, w, z).coords, expected, atol=1e-12)


def test_curvature_is_parallel_along_geodesics(algebra, rng):
    x, y = _point(algebra, rng), _point(algebra, rng)
    v, w, z = (random_element(algebra, rng, 0.5) for _ in range(3))
    assert transport_curvature_check(x, y, 0.7, v, w, z) < 1e-9


def test_rn_cone_is_flat():
    algebra = make_algebra("rn:4")
    rng = np.random.default_rng(5)
    p = _point(algebra, rng)
    v, w, z = (random_element(algebra, rng) for _ in range(3))
    np.testing.assert_allclose(curvature(p, v, w, z).coords, 0.0, atol=1e-10)


# ============= Killing fields =============

def test_killing_flow_derivative_is_field(algebra, rng):
    x, p = random_element(algebra, rng, 0.5), _point(algebra, rng)
    h = 1e-5
    numeric = (killing_flow(x, p, h).p.coords - killing_flow(x, p, -h).p.coords) / (2.0 * h)
    np.testing.assert_allclose(numeric, killing_field(x, p).coords, atol=1e-8 * (1.0 + p.p.norm2()))


def test_killing_flow_from_unit_is_exp(algebra, rng):
    x = random_element(algebra, rng, 0.5)
    np.testing.assert_allclose(killing_flow(x, ConePoint.unit(algebra), 1.0).p.coords, exp(x).coords, atol=1e-10)


def test_killing_flow_is_a_flow_of_symmetric_space_maps(algebra, rng):
    x = random_element(algebra, rng, 0.5)
    a, b = _point(algebra, rng), _point(algebra, rng)
    np.testing.assert_allclose(
        killing_flow(x, a, 0.7).p.coords, killing_flow(x, killing_flow(x, a, 0.3), 0.4).p.coords, atol=1e-10
    )
    np.testing.assert_allclose(
        killing_flow(x, mu(a, b), 0.5).p.coords,
        mu(killing_flow(x, a, 0.5), killing_flow(x, b, 0.5)).coords,
        atol=1e-8,
    )


# ============= Finsler structure =============

def test_thompson_distance_example(sym2):
    p = ConePoint(Element.from_matrix(sym2, np.diag([1.0, 4.0])))
    q = ConePoint(Element.from_matrix(sym2, np.diag([4.0, 1.0])))
    assert thompson_distance(p, q) == pytest.approx(math.log(4.0), abs=1e-12)


@given(seed=seeds)
def test_thompson_metric_axioms(algebra, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (_point(algebra, rng) for _ in range(3))
    ab = thompson_distance(a, b)
    assert thompson_distance(a, a) == pytest.approx(0.0, abs=1e-10)
    assert ab == pytest.approx(thompson_distance(b, a), rel=1e-9, abs=1e-12)
    assert ab <= thompson_distance(a, c) + thompson_distance(c, b) + 1e-12


def test_thompson_distance_equals_geodesic_speed(algebra, rng):
    x, y = _point(algebra, rng), _point(algebra, rng)
    assert finsler_norm(x, log_map(x, y)) == pytest.approx(thompson_distance(x, y), rel=1e-9)


def test_finsler_norm_with_gauge(sym2):
    p = ConePoint.unit(sym2)
    v = Element.from_matrix(sym2, np.diag([3.0, -4.0]))
    assert finsler_norm(p, v) == pytest.approx(4.0)
    assert finsler_norm(p, v, GaugeFunction.parse("lp:1")) == pytest.approx(7.0)


def test_geodesic_convexity(algebra, rng):
    a, b, c, d = (_point(algebra, rng) for _ in range(4))
    times = np.linspace(0.0, 1.0, 11)
    profile = convexity_profile(a, b, c, d, times)
    for t, value in zip(times, profile):
        assert value <= (1.0 - t) * profile[0] + t * profile[-1] + 1e-9


@pytest.mark.parametrize("method", ["direct", "peirce"])
def test_lie_velocity_routes_agree(algebra, rng, method):
    gamma, dgamma = random_element(algebra, rng, 0.7), random_element(algebra, rng)
    reference = lie_velocity(gamma, dgamma)
    np.testing.assert_allclose(lie_velocity(gamma, dgamma, method).coords, reference.coords, atol=1e-6)


def test_lie_velocity_rejects_unknown_method(sym2):
    with pytest.raises(ValueError):
        lie_velocity(Element.zero(sym2), Element.unit(sym2), "nope")


# ============= Lengths =============

def test_geodesic_length_is_finsler_norm(algebra, rng):
    p, v = _point(algebra, rng), random_element(algebra, rng)
    path = competitor_path(p, v, [], [], intervals=64)
    assert path_length(path) == pytest.approx(finsler_norm(p, v), rel=1e-9)


def test_competitors_are_no_shorter(sym3, rng):
    p, v = _point(sym3, rng), random_element(sym3, rng)
    reference = finsler_norm(p, v)
    for _ in range(3):
        directions = [random_element(sym3, rng) for _ in range(3)]
        amplitudes = rng.uniform(0.05, 0.3, 3)
        path = competitor_path(p, v, amplitudes, directions, intervals=512)
        np.testing.assert_allclose(path.points[-1].coords, geodesic(p, v, 1.0).p.coords, atol=1e-9)
        assert path_length(path) >= reference - 1e-6


def test_straight_segment_is_no_shorter_than_geodesic(sym2):
    a = Element.from_matrix(sym2, np.diag([1.0, 2.0]))
    b = Element.from_matrix(sym2, [[3.0, 1.0], [1.0, 1.0]])
    path = SampledPath(sym2, lambda t: a + t * (b - a), lambda t: b - a, intervals=512)
    assert path_length(path) >= thompson_distance(ConePoint(a), ConePoint(b)) - 1e-8


def test_path_length_needs_cone_path(sym2):
    path = SampledPath(sym2, lambda t: Element.unit(sym2), cone=False, intervals=4)
    with pytest.raises(ValueError):
        path_length(path)


def test_sampled_path_detects_leaving_the_cone(sym2):
    path = SampledPath(sym2, lambda t: Element.from_matrix(sym2, np.diag([1.0 - 2.0 * t, 1.0])), intervals=4)
    with pytest.raises(DomainError):
        _ = path.points


def test_simpson_rejects_odd_interval_counts():
    assert simpson(np.linspace(0.0, 1.0, 5) ** 2) == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        simpson([0.0, 1.0])
