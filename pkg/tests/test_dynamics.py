import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chessbilliard import (
    AffineCircleMap,
    ChessMap,
    Circle,
    Ellipse,
    Polygon,
    QPoint,
    detect_connection,
    find_periodic,
    fixed_points,
    has_fixed_point,
    is_semi_stable,
    neutral_cylinders,
    omega_limit_sample,
    random_convex_polygon,
    rotation_number,
    step_S,
    step_T,
    triangle_classify,
)
from chessbilliard import _kernels
from chessbilliard.dynamics import rational_candidates
from chessbilliard.geometry import circular_distance

from conftest import PERIOD3

angles = st.floats(0.0, math.pi, exclude_max=True)


def test_period_three_orbit_by_hand(square):
    cm = ChessMap(square, *PERIOD3)
    x = QPoint(square.param((1, 0.5)), 1)
    expected = [(0, 1 / 6), (1 / 4, 0), (1, 1 / 4), (0, 11 / 12), (1 / 4, 1), (1, 1 / 2)]
    for k, xy in enumerate(expected):
        x = step_T(cm, x)
        assert x.copy == (2 if k % 2 == 0 else 1)
        assert square.point(x.s) == pytest.approx(xy, abs=1e-12)


def test_step_S_is_two_steps(square):
    cm = ChessMap(square, 0.3, 2.2)
    x = QPoint(0.7, 2)
    assert step_S(cm, x) == step_T(cm, step_T(cm, x))
    assert cm(0.7, copy=2) == pytest.approx(step_S(cm, x).s)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 1000), t1=angles, t2=angles, s=st.floats(0, 1, exclude_max=True))
def test_copies_are_mutually_inverse(seed, t1, t2, s):
    poly = random_convex_polygon(np.random.default_rng(seed), 5)
    cm = ChessMap(poly, t1, t2)
    s0 = s * poly.length
    back = cm(cm(s0, copy=1), copy=2)
    assert circular_distance(back, s0, poly.length) < 1e-9 * poly.length


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 1000), t1=angles, t2=angles)
def test_table_matches_geometric_step(seed, t1, t2):
    poly = random_convex_polygon(np.random.default_rng(seed), 6)
    cm = ChessMap(poly, t1, t2)
    s = np.linspace(0, poly.length, 500, endpoint=False)
    for copy in (1, 2):
        a = _kernels.iterate_many(*cm.kernel(copy), s, 1, cm.eps)
        b = _kernels.iterate_many(*cm.orbit_kernel(copy), s, 1, cm.eps)
        d = np.abs((a - b + poly.length / 2) % poly.length - poly.length / 2)
        assert d.max() < 1e-9 * poly.length


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 1000), t1=angles, t2=angles)
def test_S_preserves_orientation(seed, t1, t2):
    # a circle homeomorphism of degree one: lifted images increase with s
    poly = random_convex_polygon(np.random.default_rng(seed), 4)
    cm = ChessMap(poly, t1, t2)
    L = poly.length
    s = np.linspace(0, L, 400, endpoint=False)
    img = cm(s)
    steps = np.diff(np.append(img, img[0])) % L
    assert abs(steps.sum() - L) < 1e-9 * L


def test_circle_rotation_numbers():
    cm = ChessMap(Circle(), 0.0, math.pi / 3)
    e1, e2 = rotation_number(cm, 1), rotation_number(cm, 2)
    assert e1.rational == (1, 3) and e2.rational == (2, 3)
    assert e1.value == pytest.approx(1 / 3, abs=e1.error_bound)
    assert find_periodic(cm, 1, 1, 3) is not None
    # the lift rules out the wrong numerator
    assert find_periodic(cm, 1, 2, 3) is None


@settings(max_examples=30, deadline=None)
@given(t1=angles, t2=angles, r=st.floats(0.2, 5.0))
def test_circle_law(t1, t2, r):
    est = rotation_number(ChessMap(Circle(r), t1, t2), 1, n=20_000, identify=False)
    exact = ((t2 - t1) / math.pi) % 1.0
    d = abs((est.value - exact + 0.5) % 1.0 - 0.5)
    assert d <= est.error_bound


def test_ellipse_is_a_rotation():
    # an affine image of the circle: rho follows the transformed angles
    a, b = 2.0, 1.0
    t1, t2 = 0.4, 2.0
    tp = [math.atan2(math.sin(t) / b, math.cos(t) / a) for t in (t1, t2)]
    est = rotation_number(ChessMap(Ellipse(a, b), t1, t2), 1, identify=False)
    assert est.value == pytest.approx(((tp[1] - tp[0]) / math.pi) % 1.0, abs=est.error_bound)


def test_identity_map_has_rotation_zero(square):
    cm = ChessMap(square, 0.7, 0.7)
    est = rotation_number(cm)
    assert est.rational == (0, 1)
    assert abs((est.value + 0.5) % 1 - 0.5) <= est.error_bound
    assert has_fixed_point(cm) is not None


def test_rational_candidates():
    assert rational_candidates(0.3334, 1e-3, 10)[0] == (1, 3)
    assert rational_candidates(0.0, 1e-5, 50) == [(0, 1)]
    assert rational_candidates(0.999999, 1e-5, 50) == [(1, 1)]


def test_square_fixed_points_same_quadrant(square):
    cm = ChessMap(square, 0.3, 0.5)
    pts = fixed_points(cm)
    assert sorted(pts) == [1.0, 3.0]
    assert all(is_semi_stable(cm, p) for p in pts)
    assert rotation_number(cm).rational == (0, 1)


def test_no_fixed_point_other_quadrant(square):
    assert has_fixed_point(ChessMap(square, 0.3, 2.0)) is None
    assert has_fixed_point(ChessMap(Ellipse(2, 1), 0.3, 0.5)) is None


def test_connections_on_circle():
    quarter = detect_connection(ChessMap(Circle(), 0.0, math.pi / 2))
    assert quarter and all(c.length == 1 for c in quarter)
    third = detect_connection(ChessMap(Circle(), 0.0, math.pi / 3))
    assert len(third) == 2 and all(c.length == 2 for c in third)
    assert detect_connection(ChessMap(Circle(), 0.0, 1.0)) == []


def test_connection_path_is_an_orbit(square):
    cm = ChessMap(square, math.pi / 4, 3 * math.pi / 4)
    conns = detect_connection(cm)
    assert conns
    for c in conns:
        for a, b in zip(c.path, c.path[1:]):
            assert step_T(cm, a).s == pytest.approx(b.s)
        assert c.path[0] == c.start and c.path[-1] == c.end


def brute_neutral_fraction(cm, q, copy, m=4000):
    s = np.linspace(0, cm.length, m, endpoint=False)
    end = _kernels.iterate_many(*cm.kernel(copy), s, q, cm.eps)
    d = np.abs((end - s + cm.length / 2) % cm.length - cm.length / 2)
    return float(np.mean(d < 1e-9 * cm.length))


@pytest.mark.parametrize(
    "dirs,q,copy",
    [((math.pi / 4, 3 * math.pi / 4), 2, 1), (PERIOD3, 3, 1), (PERIOD3, 3, 2)],
)
def test_fully_neutral_square_maps(square, dirs, q, copy):
    cm = ChessMap(square, *dirs)
    assert brute_neutral_fraction(cm, q, copy) == 1.0
    cyl = neutral_cylinders(cm, q, copy=copy)
    assert len(cyl) == 1 and cyl[0].neutral and cyl[0].width == pytest.approx(square.length)


def test_isolated_cylinders_are_periodic_points():
    rng = np.random.default_rng(5)
    found = 0
    while found < 5:
        poly = random_convex_polygon(rng, 5)
        cm = ChessMap(poly, *rng.uniform(0, math.pi, 2))
        est = rotation_number(cm)
        if est.rational is None:
            continue
        q = est.rational[1]
        cyl = neutral_cylinders(cm, q, est)
        assert 1 <= len(cyl) <= 3 * 5 - 4
        frac = brute_neutral_fraction(cm, q, 1)
        for c in cyl:
            end = _kernels.iterate_many(*cm.kernel(1), np.array([c.lo]), q, cm.eps)[0]
            assert circular_distance(end, c.lo, poly.length) < 1e-8 * poly.length
            if not c.neutral:
                assert c.width == 0
        if not any(c.neutral for c in cyl):
            assert frac < 0.01
        found += 1


def test_neutral_cylinders_needs_confirmed_rational(square):
    cm = ChessMap(square, 0.3, 2.0)
    est = rotation_number(cm)
    with pytest.raises(ValueError):
        neutral_cylinders(cm, est.rational[1] + 1, est)
    with pytest.raises(ValueError):
        neutral_cylinders(ChessMap(Circle(), 0, 1), 3)


def test_triangle_classify_equilateral():
    tri = Polygon([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    q, w = triangle_classify(ChessMap(tri, 0.2, 0.2 + math.pi / 2))
    cm = ChessMap(tri, 0.2, 0.2 + math.pi / 2)
    end = _kernels.iterate_many(*cm.kernel(1), np.array([w]), q, cm.eps)[0]
    assert q in (1, 2, 3)
    assert circular_distance(end, w, tri.length) < 1e-9 * tri.length


def test_triangle_exceptional_direction():
    tri = Polygon([[0, 0], [2, 0], [0.5, 1.5]])
    q, w = triangle_classify(ChessMap(tri, 0.0, 2.0))
    assert q in (1, 2, 3)


def test_omega_limit_sample_sorted():
    cm = ChessMap(Ellipse(2, 1), 0.3, 1.9)
    sample = omega_limit_sample(cm, QPoint(0.1, 1), burn_in=100, n=500)
    assert len(sample) == 500
    assert np.all(np.diff(sample) >= 0)


@settings(max_examples=30, deadline=None)
@given(
    cuts=st.lists(st.integers(1, 19), min_size=1, max_size=4, unique=True),
    shift=st.floats(0, 1, exclude_max=True),
)
def test_affine_circle_map_inverse(cuts, shift):
    # a circle map with given break points, built by rescaling pieces
    L = 2.0
    # cuts on a 1/20 lattice keep every piece well away from zero length
    starts = np.concatenate([[0.0], np.sort(cuts) * L / 20])
    lengths = np.diff(np.append(starts, L))
    img_len = lengths[::-1]  # a permutation of lengths keeps the total
    slopes = img_len / lengths
    images = (shift * L + np.concatenate([[0.0], np.cumsum(img_len)[:-1]])) % L
    f = AffineCircleMap(starts, slopes, images, L)
    z = np.linspace(0, L, 97, endpoint=False)
    back = f.inverse()(f(z))
    assert np.max(np.abs((back - z + L / 2) % L - L / 2)) < 1e-12
