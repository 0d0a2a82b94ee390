"""The square's cross-section map on the diagonal ``D = {x + y = 1}``.

Points of ``D`` are measured by arc length ``z`` in ``[0, sqrt(2))`` from
``(0, 1)`` toward ``(1, 0)``, so ``D(z) = (z/sqrt(2), 1 - z/sqrt(2))``. The
directions are ``phi1 = theta1`` in ``(0, pi/2)`` and ``phi2 = pi - theta2``
in ``(0, pi/2)``.

``F`` is built two ways: by following the flow lines through the square
(``f_geometric``) and from closed-form piece lengths and slopes
(``f_model``). The two are independent and are checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import DEFAULT_ITERS, DEFAULT_QMAX, AffineCircleMap, RotationEstimate, rotation_number

SQRT2 = math.sqrt(2.0)
PHI_EPS = 1e-12


def _check_phi(phi1: float, phi2: float, allow_diagonal: bool = True):
    for name, phi in (("phi1", phi1), ("phi2", phi2)):
        if not (PHI_EPS < phi < math.pi / 2 - PHI_EPS):
            raise ValueError(f"{name}={phi!r} must lie in (0, pi/2)")
    if not allow_diagonal and abs(phi2 - math.pi / 4) <= PHI_EPS:
        raise ValueError("phi2 = pi/4 is the degenerate two-piece case")


def thetas(phi1: float, phi2: float) -> tuple[float, float]:
    """Chess map directions ``(theta1, theta2)`` for the pair ``(phi1, phi2)``."""
    return phi1, math.pi - phi2


def phis(theta1: float, theta2: float) -> tuple[float, float]:
    """Inverse of :func:`thetas`; directions must lie in different quadrants."""
    if not (0 < theta1 < math.pi / 2 < theta2 < math.pi):
        raise ValueError("expects theta1 in (0, pi/2) and theta2 in (pi/2, pi)")
    return theta1, math.pi - theta2


def bound_constant(phi1: float) -> float:
    """``-sin(phi1) / sin(3pi/4 - phi1)``."""
    return -math.sin(phi1) / math.sin(0.75 * math.pi - phi1)


def _exit(p, d):
    """Largest ``t >= 0`` with ``p + t d`` still in the unit square."""
    t = math.inf
    for k in range(2):
        if d[k] > 0:
            t = min(t, (1.0 - p[k]) / d[k])
        elif d[k] < 0:
            t = min(t, -p[k] / d[k])
    return max(t, 0.0)


def _clamp(p):
    return (min(max(p[0], 0.0), 1.0), min(max(p[1], 0.0), 1.0))


def f_geometric(phi1: float, phi2: float, z: float, return_crossed: bool = False):
    """``F(z)`` by following the three flow segments through the square.

    With ``return_crossed`` also reports whether the middle segment crossed
    ``D`` (the points of ``A1``).
    """
    _check_phi(phi1, phi2)
    if not (0.0 <= z < SQRT2):
        raise ValueError(f"z={z!r} outside [0, sqrt(2))")
    u = (math.cos(phi1), math.sin(phi1))
    v = (-math.cos(phi2), math.sin(phi2))
    p = (z / SQRT2, 1.0 - z / SQRT2)
    t = _exit(p, u)
    a = _clamp((p[0] + t * u[0], p[1] + t * u[1]))
    # the other end of the theta2 chord through a
    tf, tb = _exit(a, v), _exit(a, (-v[0], -v[1]))
    t = tf if tf >= tb else -tb
    b = _clamp((a[0] + t * v[0], a[1] + t * v[1]))
    gap = 1.0 - b[0] - b[1]
    crossed = gap > 0
    # move along theta1 (forward if below D, backward if above) back onto D
    t = gap / (u[0] + u[1])
    xc = b[0] + t * u[0]
    w = SQRT2 * xc if crossed else SQRT2 - SQRT2 * xc
    w %= SQRT2
    if w >= SQRT2:
        w = 0.0
    return (w, crossed) if return_crossed else w


def crossing_length(phi1: float, phi2: float, m: int = 4096) -> float:
    """Length of the set of ``z`` whose middle segment crosses ``D``.

    Measured from :func:`f_geometric` alone by bisecting each change of the
    crossing predicate found on an ``m``-point grid. Arcs shorter than the
    grid spacing ``sqrt(2)/m`` can be missed.
    """
    zs = np.linspace(0.0, SQRT2, m, endpoint=False)
    flags = [f_geometric(phi1, phi2, z, True)[1] for z in zs]
    edges = []
    for i in range(m):
        j = (i + 1) % m
        if flags[i] != flags[j]:
            lo, hi = zs[i], zs[j] if j else SQRT2
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if f_geometric(phi1, phi2, mid % SQRT2, True)[1] == flags[i]:
                    lo = mid
                else:
                    hi = mid
            edges.append((0.5 * (lo + hi), flags[i]))
    if not edges:
        return SQRT2 if flags[0] else 0.0
    total = 0.0
    for k, (e, was_crossed) in enumerate(edges):
        if not was_crossed:
            nxt = edges[(k + 1) % len(edges)][0]
            total += (nxt - e) % SQRT2
    return total


@dataclass(frozen=True)
class FMapModel:
    """Closed-form description of ``F`` for ``phi2 != pi/4``.

    ``a`` and ``a_img`` hold the lengths of ``A1, A2, A3`` and of their
    images; ``slopes`` the derivative of ``F`` on each. ``starts`` and
    ``images`` give the pieces in the order they occur along ``D``.
    """

    phi1: float
    phi2: float
    branch: str
    a: tuple[float, float, float]
    a_img: tuple[float, float, float]
    slopes: tuple[float, float, float]
    order: tuple[int, int, int]
    starts: tuple[float, float, float]
    images: tuple[float, float, float]

    def __call__(self, z):
        return self.circle_map()(z)

    def circle_map(self) -> AffineCircleMap:
        sl = [self.slopes[i] for i in self.order]
        return AffineCircleMap(self.starts, sl, self.images, SQRT2)

    @property
    def marked_point(self) -> float:
        """Start of ``A3``, where ``A2`` and ``A3`` meet (preimage of corner ``(1, 1)``)."""
        return self.starts[self.order.index(2)]

    def to_json(self) -> dict:
        return {
            "phi1": self.phi1,
            "phi2": self.phi2,
            "a": list(self.a),
            "a_img": list(self.a_img),
            "slopes": list(self.slopes),
        }


def closed_form_a1(phi1: float, phi2: float) -> float:
    """Length of ``A1`` from the branch formulas."""
    if phi2 < math.pi / 4:
        return (1 - math.tan(phi2)) * math.sin(math.pi / 2 - phi1) / math.sin(math.pi / 4 + phi1)
    return (1 - 1 / math.tan(phi2)) * math.sin(phi1) / math.sin(0.75 * math.pi - phi1)


def f_model(phi1: float, phi2: float) -> FMapModel:
    """Piecewise affine model of ``F``.

    ``A1`` is translated rigidly; ``A2`` and ``A3`` meet at the preimage of
    the corner ``(1, 1)`` and have reciprocal slopes
    ``tan(phi2)/tan(phi1)`` and ``tan(phi1)/tan(phi2)``.
    """
    _check_phi(phi1, phi2, allow_diagonal=False)
    c1, s1 = math.cos(phi1), math.sin(phi1)
    k = c1 + s1
    t1, t2 = math.tan(phi1), math.tan(phi2)
    a1 = closed_form_a1(phi1, phi2)
    slopes = (1.0, t2 / t1, t1 / t2)
    if phi2 > math.pi / 4:
        branch = "high"
        a2 = SQRT2 * s1 / (t2 * k)
        a3 = SQRT2 * c1 / k
        order = (0, 1, 2)
        starts = (0.0, a1, a1 + a2)
        images = (SQRT2 - a1, 0.0, a3)
    else:
        branch = "low"
        a2 = SQRT2 * s1 / k
        a3 = SQRT2 * c1 * t2 / k
        order = (1, 2, 0)
        starts = (0.0, a2, a2 + a3)
        images = (a1, a1 + a3, 0.0)
    a = (a1, a2, a3)
    a_img = tuple(a[i] * slopes[i] for i in range(3))
    return FMapModel(phi1, phi2, branch, a, a_img, slopes, order, starts, images)


def _circ(d: float) -> float:
    return (d + 0.5 * SQRT2) % SQRT2 - 0.5 * SQRT2


def f_dphi2(phi1: float, phi2: float, z: float, h: float = 1e-6) -> float:
    """Central difference of ``F(z)`` in ``phi2`` (values compared on the circle)."""
    if h == 0:
        raise ValueError("step must be nonzero")
    lo, hi = sorted((phi2 - h, phi2 + h))
    if (lo - math.pi / 4) * (hi - math.pi / 4) <= 0:
        raise ValueError("finite difference step crosses phi2 = pi/4")
    up = f_geometric(phi1, phi2 + h, z)
    down = f_geometric(phi1, phi2 - h, z)
    return _circ(up - down) / (2 * h)


def f_rotation_number(
    phi1: float,
    phi2: float,
    n: int = DEFAULT_ITERS,
    q_max: int = DEFAULT_QMAX,
    identify: bool = True,
    m: int = 256,
) -> RotationEstimate:
    """Rotation number of ``F`` through the same lift machinery as ``S``."""
    fmap = f_model(phi1, phi2).circle_map()
    return rotation_number(fmap, 1, n=n, q_max=q_max, m=m, identify=identify)


def f_graph(phi1: float, phi2: float, m: int = 512):
    """Sample points ``(z, F(z))`` of the graph from the geometric construction."""
    zs = np.linspace(0.0, SQRT2, m, endpoint=False)
    return zs, np.array([f_geometric(phi1, phi2, z) for z in zs])
