"""Convex domains and the boundary involutions induced by parallel foliations.

A domain is parametrized counterclockwise by ``s`` in ``[0, L)``:

* circle of radius ``r``: arc length, ``s = 0`` at ``(r, 0)``;
* ellipse with semi-axes ``a >= b``: the angle parameter ``t`` of
  ``(a cos t, b sin t)``, so ``L = 2*pi``;
* convex polygon: arc length from vertex 0.

For a direction ``theta`` (taken modulo ``pi``) the involution sends a
boundary point to the other end of the chord through it in that direction.
Points touched only by a supporting line are fixed, and on an edge parallel
to ``theta`` the involution is the mirror about the edge midpoint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels

EPS_GEOM = 1e-12


class QPoint(NamedTuple):
    """A point of ``Q = boundary x {1, 2}``."""

    s: float
    copy: int


class GeometryError(ValueError):
    pass


def normalize_angle(theta: float) -> float:
    """Reduce an angle to the projective range ``[0, pi)``."""
    t = math.fmod(theta, math.pi)
    if t < 0:
        t += math.pi
    if t >= math.pi:
        t -= math.pi
    return t


def quadrant(theta: float) -> int:
    """0 for ``[0, pi/2)``, 1 for ``[pi/2, pi)``."""
    return 0 if normalize_angle(theta) < math.pi / 2 else 1


@dataclass(frozen=True)
class FixedSet:
    """Fixed components of one involution.

    ``components`` holds two ``(lo, hi)`` parameter pairs, with ``lo == hi``
    for an isolated touch point; ``hi`` may equal ``L`` when an edge ends at
    vertex 0. ``points`` are the designated fixed points (the touch point or
    the midpoint of the parallel edge).
    """

    components: tuple[tuple[float, float], tuple[float, float]]
    points: tuple[float, float]
    length: float

    def contains(self, s: float, tol: float) -> bool:
        return any(_in_arc(s, lo, hi, self.length, tol) for lo, hi in self.components)

    def is_designated(self, s: float, tol: float) -> bool:
        return any(circular_distance(s, p, self.length) <= tol for p in self.points)


@dataclass(frozen=True)
class Foliation:
    theta: float
    data: np.ndarray
    fixed: FixedSet


def circular_distance(a: float, b: float, L: float) -> float:
    d = abs(a - b) % L
    return min(d, L - d)


def signed_circular(d: float, L: float) -> float:
    """Representative of ``d`` modulo ``L`` in ``[-L/2, L/2)``."""
    return (d + 0.5 * L) % L - 0.5 * L


def _in_arc(s, lo, hi, L, tol):
    d = (s - lo) % L
    return d <= hi - lo + tol or d >= L - tol


class Domain:
    """Base class. Subclasses are immutable once constructed."""

    kind: int
    length: float
    diameter: float
    center: tuple[float, float]

    @property
    def eps(self) -> float:
        return EPS_GEOM * self.diameter

    @property
    def cum(self) -> np.ndarray:
        return self._cum

    def _check(self, s):
        if not (0.0 <= s < self.length):
            raise GeometryError(f"parameter {s!r} outside [0, {self.length})")

    def point(self, s: float) -> tuple[float, float]:
        raise NotImplementedError

    def param(self, xy) -> float:
        """Boundary parameter of a point on (or next to) the boundary."""
        raise NotImplementedError

    def foliation(self, theta: float) -> Foliation:
        raise NotImplementedError

    def points(self, s) -> np.ndarray:
        return np.array([self.point(float(v)) for v in np.atleast_1d(s)])

    def involution(self, theta: float, s: float) -> float:
        self._check(s)
        fol = self.foliation(theta)
        return float(_kernels.involution(self.kind, self._cum, fol.data, float(s), self.eps))

    def fixed_set(self, theta: float) -> FixedSet:
        return self.foliation(theta).fixed

    def is_exceptional(self, theta: float) -> bool:
        return False

    def central_reflection(self, s: float) -> float:
        """Parameter of the point reflected through ``center``."""
        x, y = self.point(s)
        cx, cy = self.center
        return self.param((2 * cx - x, 2 * cy - y))

    def to_json(self) -> dict:
        raise NotImplementedError


class Circle(Domain):
    kind = 0

    def __init__(self, r: float = 1.0):
        if not r > 0:
            raise GeometryError("circle radius must be positive")
        self.r = float(r)
        self.length = 2 * math.pi * self.r
        self.diameter = 2 * self.r
        self.center = (0.0, 0.0)
        self._cum = np.array([0.0, self.length])

    def __repr__(self):
        return f"Circle(r={self.r})"

    def point(self, s):
        self._check(s)
        t = s / self.r
        return (self.r * math.cos(t), self.r * math.sin(t))

    def param(self, xy):
        t = math.atan2(xy[1], xy[0]) % (2 * math.pi)
        return _clip(self.r * t, self.length)

    def foliation(self, theta):
        theta = normalize_angle(theta)
        L = self.length
        c = (self.r * (2 * theta + math.pi)) % L
        a = (self.r * (theta + math.pi / 2)) % L
        b = (a + L / 2) % L
        fixed = FixedSet(((a, a), (b, b)), (a, b), L)
        return Foliation(theta, np.array([c]), fixed)

    def to_json(self):
        return {"kind": "circle", "r": self.r}


class Ellipse(Domain):
    kind = 0

    def __init__(self, a: float = 2.0, b: float = 1.0):
        if not (a > 0 and b > 0):
            raise GeometryError("ellipse semi-axes must be positive")
        if b > a:
            raise GeometryError("ellipse expects a >= b")
        self.a = float(a)
        self.b = float(b)
        self.length = 2 * math.pi
        self.diameter = 2 * self.a
        self.center = (0.0, 0.0)
        self._cum = np.array([0.0, self.length])

    def __repr__(self):
        return f"Ellipse(a={self.a}, b={self.b})"

    def point(self, s):
        self._check(s)
        return (self.a * math.cos(s), self.b * math.sin(s))

    def param(self, xy):
        return _clip(math.atan2(xy[1] / self.b, xy[0] / self.a) % (2 * math.pi), self.length)

    def foliation(self, theta):
        theta = normalize_angle(theta)
        # the affine map (x/a, y/b) sends the ellipse to the unit circle
        tp = math.atan2(math.sin(theta) / self.b, math.cos(theta) / self.a)
        L = self.length
        c = (2 * tp + math.pi) % L
        a = (tp + math.pi / 2) % L
        b = (a + math.pi) % L
        return Foliation(theta, np.array([c]), FixedSet(((a, a), (b, b)), (a, b), L))

    def to_json(self):
        return {"kind": "ellipse", "a": self.a, "b": self.b}


class Polygon(Domain):
    """Strictly convex polygon with counterclockwise vertices."""

    kind = 1

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise GeometryError("polygon needs at least 3 vertices given as [x, y] pairs")
        k = v.shape[0]
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        scale = float(np.max(np.hypot(*(v - v.mean(axis=0)).T)))
        if np.any(lengths <= EPS_GEOM * scale):
            raise GeometryError("polygon has repeated vertices")
        cross = edges[:, 0] * np.roll(edges[:, 1], -1) - edges[:, 1] * np.roll(edges[:, 0], -1)
        if np.any(cross <= EPS_GEOM * scale * scale):
            raise GeometryError("polygon must be strictly convex and counterclockwise")
        # a star-shaped winding would pass the local test; total turning must be 2*pi
        turn = np.sum(np.arctan2(cross, np.sum(edges * np.roll(edges, -1, axis=0), axis=1)))
        if abs(turn - 2 * math.pi) > 1e-6:
            raise GeometryError("polygon must be simple (turning number 1)")
        self.vertices = v
        self.vertices.setflags(write=False)
        self.k = k
        self._edges = edges
        self._lengths = lengths
        self._cum = np.concatenate([[0.0], np.cumsum(lengths)])
        self._cum.setflags(write=False)
        self.length = float(self._cum[-1])
        d = v[:, None, :] - v[None, :, :]
        self.diameter = float(np.max(np.hypot(d[..., 0], d[..., 1])))
        self.center = tuple(v.mean(axis=0))

    def __repr__(self):
        return f"Polygon({self.vertices.tolist()})"

    @classmethod
    def square(cls):
        return cls([[0, 0], [1, 0], [1, 1], [0, 1]])

    @property
    def vertex_params(self) -> np.ndarray:
        return self._cum[:-1].copy()

    def point(self, s):
        self._check(s)
        e = min(int(np.searchsorted(self._cum, s, side="right")) - 1, self.k - 1)
        t = (s - self._cum[e]) / self._lengths[e]
        p = self.vertices[e] + t * self._edges[e]
        return (float(p[0]), float(p[1]))

    def param(self, xy):
        p = np.asarray(xy, dtype=float)
        best, best_s = math.inf, 0.0
        for e in range(self.k):
            t = float(np.dot(p - self.vertices[e], self._edges[e]) / self._lengths[e] ** 2)
            t = min(max(t, 0.0), 1.0)
            q = self.vertices[e] + t * self._edges[e]
            dist = float(np.hypot(*(p - q)))
            if dist < best:
                best, best_s = dist, self._cum[e] + t * self._lengths[e]
        return _clip(best_s, self.length)

    def is_exceptional(self, theta):
        theta = normalize_angle(theta)
        n = np.array([-math.sin(theta), math.cos(theta)])
        return bool(np.any(np.abs(self._edges @ n) <= self.eps))

    def foliation(self, theta):
        theta = normalize_angle(theta)
        n = np.array([-math.sin(theta), math.cos(theta)])
        h = self.vertices @ n
        comps = []
        pts = []
        for ext in (np.max(h), np.min(h)):
            idx = [i for i in range(self.k) if abs(h[i] - ext) <= self.eps]
            if len(idx) == 1:
                lo = hi = float(self._cum[idx[0]])
            else:
                # two consecutive vertices (a parallel edge), possibly wrapping
                i, j = idx[0], idx[-1]
                first = j if (i == 0 and j == self.k - 1) else i
                lo = float(self._cum[first])
                hi = lo + float(self._lengths[first])
            comps.append((lo, hi))
            pts.append(_clip(0.5 * (lo + hi) % self.length, self.length))
        data = np.concatenate([[comps[0][0], comps[0][1], comps[1][0], comps[1][1]], h])
        fixed = FixedSet((comps[0], comps[1]), (pts[0], pts[1]), self.length)
        return Foliation(theta, data, fixed)

    def to_json(self):
        return {"kind": "polygon", "vertices": self.vertices.tolist()}


def _clip(s, L):
    s = float(s)
    if s >= L or s < 0:
        s %= L
        if s >= L:
            s = 0.0
    return s


def boundary_point(domain: Domain, s: float) -> tuple[float, float]:
    return domain.point(s)


def involution(domain: Domain, theta: float, s: float) -> float:
    return domain.involution(theta, s)


def fixed_set(domain: Domain, theta: float) -> FixedSet:
    return domain.fixed_set(theta)


def affinity_breakpoints(domain: Domain, theta1: float, theta2: float, copy: int = 1) -> np.ndarray:
    """Points of ``Q_copy`` cutting the boundary into pieces where ``S`` is affine.

    For copy 1 these are the vertices ``V``, their ``theta1`` partners
    ``T1(V)`` and ``T1(T2(V))``; at most ``3k - 4`` distinct points.
    """
    if not isinstance(domain, Polygon):
        raise GeometryError("affinity breakpoints are defined for polygons only")
    first, second = (theta1, theta2) if copy == 1 else (theta2, theta1)
    fa = domain.foliation(first).data
    fb = domain.foliation(second).data
    V = domain.vertex_params
    tv = _kernels.involution_many(1, domain.cum, fa, V, domain.eps)
    t2v = _kernels.involution_many(1, domain.cum, fb, V, domain.eps)
    t12v = _kernels.involution_many(1, domain.cum, fa, t2v, domain.eps)
    return unique_circular(np.concatenate([V, tv, t12v]), domain.length, 1e-11 * domain.length)


def unique_circular(values, L, tol) -> np.ndarray:
    v = np.sort(np.asarray(values, dtype=float) % L)
    if v.size == 0:
        return v
    keep = [v[0]]
    for x in v[1:]:
        if x - keep[-1] > tol:
            keep.append(x)
    if len(keep) > 1 and keep[0] + L - keep[-1] <= tol:
        keep.pop()
    return np.array(keep)


def domain_from_json(spec) -> Domain:
    """Build a domain from ``{"kind": ...}`` (a dict or a JSON string)."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    kind = spec.get("kind")
    if kind == "circle":
        return Circle(spec.get("r", 1.0))
    if kind == "ellipse":
        return Ellipse(spec["a"], spec["b"])
    if kind == "polygon":
        return Polygon(spec["vertices"])
    if kind == "square":
        return Polygon.square()
    raise GeometryError(f"unknown domain kind {kind!r}")


def random_convex_polygon(rng: np.random.Generator, k: int) -> Polygon:
    """Random strictly convex ``k``-gon: points on a circle, then a random linear stretch."""
    while True:
        ang = np.sort(rng.uniform(0.0, 2 * math.pi, k))
        gaps = np.diff(np.append(ang, ang[0] + 2 * math.pi))
        if gaps.min() > 0.05 and gaps.max() < math.pi - 0.05:
            break
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    m = np.array([[rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5)], [0.0, rng.uniform(0.5, 2.0)]])
    return Polygon(pts @ m.T + rng.uniform(-1, 1, 2))
