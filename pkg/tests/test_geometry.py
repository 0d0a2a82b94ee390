import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chessbilliard import (
    Circle,
    Ellipse,
    GeometryError,
    Polygon,
    affinity_breakpoints,
    domain_from_json,
    random_convex_polygon,
)
from chessbilliard.geometry import circular_distance, normalize_angle

angles = st.floats(0.0, math.pi, exclude_max=True)
unit = st.floats(0.0, 1.0, exclude_max=True)


def chord_partner(poly, s, theta):
    """Other end of the chord by intersecting the line with every edge."""
    p = np.array(poly.point(s))
    d = np.array([math.cos(theta), math.sin(theta)])
    best_t, best = 0.0, p
    v = poly.vertices
    for i in range(poly.k):
        a, b = v[i], v[(i + 1) % poly.k]
        m = np.column_stack([d, a - b])
        if abs(np.linalg.det(m)) < 1e-14:
            continue
        t, u = np.linalg.solve(m, a - p)
        if -1e-12 <= u <= 1 + 1e-12 and abs(t) > abs(best_t):
            best_t, best = t, p + t * d
    return poly.param(best)


def test_normalize_angle():
    assert normalize_angle(-math.pi / 4) == pytest.approx(3 * math.pi / 4)
    assert normalize_angle(math.pi) == 0.0
    assert normalize_angle(5 * math.pi / 3) == pytest.approx(2 * math.pi / 3)


def test_circle_involution_closed_form():
    c = Circle(2.0)
    for s in np.linspace(0, c.length, 17, endpoint=False):
        expected = (2.0 * (2 * 0.4 + math.pi) - s) % c.length
        assert circular_distance(c.involution(0.4, s), expected, c.length) < 1e-12


@given(s=unit, theta=angles)
def test_circle_chord_is_parallel(s, theta):
    c = Circle(1.5)
    s0 = s * c.length
    t = c.involution(theta, s0)
    (x0, y0), (x1, y1) = c.point(s0), c.point(t)
    cross = (x1 - x0) * math.sin(theta) - (y1 - y0) * math.cos(theta)
    assert abs(cross) < 1e-9


@given(s=unit, theta=angles)
def test_ellipse_chord_is_parallel(s, theta):
    e = Ellipse(2.0, 0.7)
    s0 = s * e.length
    t = e.involution(theta, s0)
    (x0, y0), (x1, y1) = e.point(s0), e.point(t)
    cross = (x1 - x0) * math.sin(theta) - (y1 - y0) * math.cos(theta)
    assert abs(cross) < 1e-9


def test_square_fixed_points_diagonal(square):
    fs = square.fixed_set(math.pi / 4)
    assert sorted(fs.points) == [1.0, 3.0]
    assert square.involution(math.pi / 4, 1.0) == 1.0
    # (1/2, 0) goes to (1, 1/2)
    assert square.involution(math.pi / 4, 0.5) == pytest.approx(1.5)


def test_square_exceptional_mirror(square):
    assert square.is_exceptional(0.0)
    assert not square.is_exceptional(0.3)
    fs = square.fixed_set(0.0)
    assert sorted(fs.points) == [0.5, 2.5]
    assert square.involution(0.0, 0.25) == pytest.approx(0.75)
    assert square.involution(0.0, 2.1) == pytest.approx(2.9)
    # vertical side points map across
    assert square.involution(0.0, 1.25) == pytest.approx(3.75)


def test_square_vertical_mirror_wraps(square):
    # direction pi/2: the left side (s in [3, 4]) is parallel and wraps past vertex 0
    fs = square.fixed_set(math.pi / 2)
    assert sorted(fs.points) == [1.5, 3.5]
    assert square.involution(math.pi / 2, 3.2) == pytest.approx(3.8)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(3, 9), s=unit, theta=angles)
def test_polygon_involution_matches_line_intersection(seed, k, s, theta):
    poly = random_convex_polygon(np.random.default_rng(seed), k)
    if poly.is_exceptional(theta):
        return
    s0 = s * poly.length
    got = poly.involution(theta, s0)
    want = chord_partner(poly, s0, theta)
    assert circular_distance(got, want, poly.length) < 1e-9 * poly.length


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(3, 9), s=unit, theta=angles)
def test_involution_is_involution(seed, k, s, theta):
    poly = random_convex_polygon(np.random.default_rng(seed), k)
    s0 = s * poly.length
    back = poly.involution(theta, poly.involution(theta, s0))
    assert circular_distance(back, s0, poly.length) < 1e-9 * poly.length


def test_breakpoints_hand_example(square):
    bp = affinity_breakpoints(square, math.atan(1 / 3), math.pi - math.atan(2 / 3))
    np.testing.assert_allclose(bp, [0, 1, 4 / 3, 2, 3, 10 / 3], atol=1e-12)


def slope_changes(poly, t1, t2, m=1500):
    """Kinks of S = T2 T1 located from the line-intersection oracle on a grid."""
    L = poly.length
    h = L / m
    xs = np.arange(m) * h
    img = np.array([chord_partner(poly, chord_partner(poly, x, t1), t2) for x in xs])
    steps = (np.diff(np.append(img, img[0])) + 0.5 * L) % L - 0.5 * L
    slopes = steps / h
    jump = np.abs(slopes - np.roll(slopes, 1)) > 1e-6 * (1 + np.abs(slopes))
    return xs[jump], h


def near(points, targets, L, tol):
    return all(min(circular_distance(p, t, L) for t in targets) <= tol for p in points)


def test_breakpoints_match_brute_force_kinks(square):
    t1, t2 = math.atan(1 / 3), math.pi - math.atan(2 / 3)
    bp = affinity_breakpoints(square, t1, t2)
    kinks, h = slope_changes(square, t1, t2)
    assert len(kinks) > 0
    assert near(kinks, bp, square.length, 2 * h)
    assert near(bp, kinks, square.length, 2 * h)


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(3, 7), t1=angles, t2=angles)
def test_every_kink_is_a_breakpoint(seed, k, t1, t2):
    poly = random_convex_polygon(np.random.default_rng(seed), k)
    kinks, h = slope_changes(poly, t1, t2, m=800)
    assert near(kinks, affinity_breakpoints(poly, t1, t2), poly.length, 2 * h)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(3, 10), t1=angles, t2=angles)
def test_breakpoint_count_bound(seed, k, t1, t2):
    poly = random_convex_polygon(np.random.default_rng(seed), k)
    for copy in (1, 2):
        assert len(affinity_breakpoints(poly, t1, t2, copy)) <= 3 * k - 4


@pytest.mark.parametrize(
    "verts",
    [
        [[0, 0], [0, 1], [1, 1], [1, 0]],  # clockwise
        [[0, 0], [1, 0], [2, 0], [1, 1]],  # collinear
        [[0, 0], [2, 0], [1, 0.2], [1, 2]],  # reflex vertex
        [[0, 0], [1, 0], [1, 0], [0, 1]],  # repeated
        [[0, 0], [1, 0]],
    ],
)
def test_polygon_validation(verts):
    with pytest.raises(GeometryError):
        Polygon(verts)


def test_domain_validation():
    with pytest.raises(GeometryError):
        Circle(0)
    with pytest.raises(GeometryError):
        Ellipse(1, 2)
    with pytest.raises(GeometryError):
        domain_from_json('{"kind": "torus"}')
    with pytest.raises(GeometryError):
        Circle().involution(0.1, 7.0)


@pytest.mark.parametrize("dom", [Circle(1.3), Ellipse(2, 1), Polygon.square()])
def test_json_round_trip(dom):
    again = domain_from_json(dom.to_json())
    assert type(again) is type(dom)
    assert again.length == pytest.approx(dom.length)


def test_point_param_round_trip(square):
    for s in np.linspace(0, 4, 13, endpoint=False):
        assert square.param(square.point(s)) == pytest.approx(s)
    assert square.point(2.25) == pytest.approx((0.75, 1.0))


def test_central_reflection(square):
    # (1, 1/2) reflects to (0, 1/2)
    assert square.central_reflection(1.5) == pytest.approx(3.5)
    e = Ellipse(2, 1)
    assert e.central_reflection(0.3) == pytest.approx(0.3 + math.pi)
