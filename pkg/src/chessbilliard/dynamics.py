"""The return map of the chess billiard and its rotation theory.

On ``Q = boundary x {1, 2}`` the chess billiard is ``T(x, i) = (T_i x, i+1)``
and the return map ``S = T^2`` acts on each copy as a circle homeomorphism:
``T2 o T1`` on copy 1 and ``T1 o T2`` on copy 2. The two restrictions are
inverse to each other, so their rotation numbers sum to an integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .geometry import (
    Domain,
    Polygon,
    QPoint,
    affinity_breakpoints,
    circular_distance,
    normalize_angle,
    signed_circular,
    unique_circular,
)

DEFAULT_ITERS = 100_000
DEFAULT_QMAX = 200
DEFAULT_GRID = 1024
TOL_REL = 1e-9
MAX_CANDIDATES = 6


class ChessMap:
    """The pair of involutions of a domain for directions ``theta1, theta2``."""

    def __init__(self, domain: Domain, theta1: float, theta2: float):
        self.domain = domain
        self.theta1 = normalize_angle(theta1)
        self.theta2 = normalize_angle(theta2)
        self.foliations = (domain.foliation(self.theta1), domain.foliation(self.theta2))
        self.length = domain.length
        self.eps = domain.eps
        self._cum = domain.cum
        self._breakpoints = {}
        self._tables = {}

    def __repr__(self):
        return f"ChessMap({self.domain!r}, {self.theta1!r}, {self.theta2!r})"

    def kernel(self, copy: int = 1):
        """Arguments ``(kind, cum, fa, fb)`` for the compiled step on a copy."""
        a, b = self.foliations if copy == 1 else self.foliations[::-1]
        return self.domain.kind, self._cum, a.data, b.data

    def inverse_kernel(self, copy: int = 1):
        return self.kernel(3 - copy)

    def involution(self, i: int, s: float) -> float:
        """``T_i`` for ``i`` in ``{1, 2}``."""
        fol = self.foliations[i - 1]
        return float(_kernels.involution(self.domain.kind, self._cum, fol.data, float(s), self.eps))

    def breakpoints(self, copy: int = 1) -> Optional[np.ndarray]:
        if not isinstance(self.domain, Polygon):
            return None
        if copy not in self._breakpoints:
            self._breakpoints[copy] = affinity_breakpoints(self.domain, self.theta1, self.theta2, copy)
        return self._breakpoints[copy]

    def orbit_kernel(self, copy: int = 1):
        """Kernel used for long orbits.

        On a polygon ``S`` is affine between consecutive breakpoints, so it is
        tabulated once from the geometric step and iterated from the table.
        """
        bp = self.breakpoints(copy)
        if bp is None:
            return self.kernel(copy)
        if copy not in self._tables:
            L = self.length
            img = _kernels.iterate_many(*self.kernel(copy), bp, 1, self.eps)
            ends = np.append(bp[1:], L)
            span = (np.append(img[1:], img[0]) - img) % L
            table = AffineCircleMap(bp, span / (ends - bp), img, L)
            self._tables[copy] = (2, table._cum, table._table, table._table)
        return self._tables[copy]

    def seeds(self, copy: int = 1) -> np.ndarray:
        """Points where periodic orbits tend to sit in degenerate cases."""
        pts = [p for f in self.foliations for p in f.fixed.points]
        bp = self.breakpoints(copy)
        if bp is not None:
            pts.extend(bp)
        return np.asarray(pts, dtype=float)

    def __call__(self, s, copy: int = 1):
        """``S`` applied to a parameter or an array of parameters on a copy."""
        arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = _kernels.iterate_many(*self.kernel(copy), arr, 1, self.eps)
        return out if np.ndim(s) else float(out[0])


class AffineCircleMap:
    """A piecewise affine circle map on ``[0, L)`` given by its pieces.

    Piece ``i`` covers ``[starts[i], starts[i+1])`` and sends ``z`` to
    ``images[i] + slopes[i] * (z - starts[i])`` modulo ``L``.
    """

    def __init__(self, starts, slopes, images, length: float):
        starts = np.asarray(starts, dtype=float)
        order = np.argsort(starts)
        self.starts = starts[order]
        self.slopes = np.asarray(slopes, dtype=float)[order]
        self.images = np.asarray(images, dtype=float)[order] % length
        if abs(self.starts[0]) > 1e-15:
            raise ValueError("the first piece must start at 0")
        self.starts[0] = 0.0
        self.length = float(length)
        self.eps = 1e-12 * self.length
        m = len(self.starts)
        self._table = np.concatenate([[m], self.starts, self.slopes, self.images])
        self._cum = np.array([0.0, self.length])
        self._inverse = None

    def kernel(self, copy: int = 1):
        return 2, self._cum, self._table, self._table

    def inverse(self) -> "AffineCircleMap":
        if self._inverse is None:
            L = self.length
            ends = np.append(self.starts[1:], L)
            st, sl, im = [], [], []
            for a, b, k, y in zip(self.starts, ends, self.slopes, self.images):
                span = k * (b - a)
                if y + span > L + self.eps:
                    # the image wraps through 0: split it
                    st += [y, 0.0]
                    sl += [1 / k, 1 / k]
                    im += [a, a + (L - y) / k]
                else:
                    st.append(y)
                    sl.append(1 / k)
                    im.append(a)
            st = np.asarray(st)
            st[np.abs(st - L) < self.eps] = 0.0
            if np.min(st) > self.eps:
                raise ValueError("map is not a bijection of the circle")
            st[np.argmin(st)] = 0.0
            self._inverse = AffineCircleMap(st, sl, im, L)
        return self._inverse

    def inverse_kernel(self, copy: int = 1):
        return self.inverse().kernel()

    def orbit_kernel(self, copy: int = 1):
        return self.kernel()

    def breakpoints(self, copy: int = 1) -> np.ndarray:
        return self.starts.copy()

    def seeds(self, copy: int = 1) -> np.ndarray:
        return self.starts.copy()

    def __call__(self, z, copy: int = 1):
        arr = np.atleast_1d(np.asarray(z, dtype=float)) % self.length
        out = _kernels.iterate_many(*self.kernel(), arr, 1, self.eps)
        return out if np.ndim(z) else float(out[0])


@dataclass
class RotationEstimate:
    """Rotation number of ``S`` on one copy.

    ``value`` is in ``[0, 1)``; ``error_bound`` bounds ``|value - rho|`` up to
    the lift ambiguity near integers. ``rational`` is ``(p, q)`` in lowest
    terms when a period-``q`` orbit has been located, with ``witness`` one of
    its points.
    """

    value: float
    error_bound: float
    iterations: int
    copy: int = 1
    rational: Optional[tuple[int, int]] = None
    witness: Optional[float] = None
    lift_value: float = field(default=0.0, repr=False)

    def to_dict(self) -> dict:
        p, q = self.rational if self.rational else (None, None)
        return {"rho": self.value, "err": self.error_bound, "p": p, "q": q}


def step_T(cmap: ChessMap, x: QPoint) -> QPoint:
    """The chess billiard map ``T(s, i) = (T_i s, i+1)``."""
    return QPoint(cmap.involution(x.copy, x.s), 3 - x.copy)


def step_S(cmap: ChessMap, x: QPoint) -> QPoint:
    return step_T(cmap, step_T(cmap, x))


def lift_displacement(cmap, x: QPoint, n: int, tol: Optional[float] = None) -> float:
    """Total lifted displacement of ``n`` steps of ``S`` from ``x``."""
    tol = TOL_REL * cmap.length if tol is None else tol
    total, _ = _kernels.lift_sum(*cmap.kernel(x.copy), float(x.s), int(n), cmap.eps, tol)
    return float(total)


def rational_candidates(x: float, err: float, q_max: int, limit: int = MAX_CANDIDATES):
    """Fractions ``p/q`` with ``q <= q_max`` inside ``[x - err, x + err]``.

    Ordered by denominator so the simplest explanation is tried first.
    """
    out = []
    for q in range(1, q_max + 1):
        for p in range(math.ceil((x - err) * q), math.floor((x + err) * q) + 1):
            if p < 0 or p > q or math.gcd(p, q) != 1:
                continue
            out.append((p, q))
            if len(out) >= limit:
                return out
    return out


def rotation_number(
    cmap,
    copy: int = 1,
    n: int = DEFAULT_ITERS,
    q_max: int = DEFAULT_QMAX,
    m: int = DEFAULT_GRID,
    tol: Optional[float] = None,
    identify: bool = True,
    start: float = 0.0,
) -> RotationEstimate:
    """Estimate the rotation number of ``S`` on ``copy`` from ``n`` iterates.

    With ``identify`` a rational ``p/q`` is reported only after a period-``q``
    orbit with the matching lift has been found.
    """
    L = cmap.length
    tol = TOL_REL * L if tol is None else tol
    kernel = cmap.orbit_kernel(copy)
    total, end = _kernels.lift_sum(*kernel, float(start), int(n), cmap.eps, tol)
    lift = total / (n * L)
    err = 1.0 / n + 1e-9
    value = lift % 1.0
    if value >= 1.0:
        value = 0.0
    est = RotationEstimate(float(value), err, int(n), copy, lift_value=float(lift))
    if identify:
        delta = 1e-6 * L
        extra = np.array([end, (end + delta) % L, (end - delta) % L])
        for p, q in rational_candidates(lift, err, q_max):
            w = find_periodic(cmap, copy, p, q, m=m, tol=tol, extra=extra)
            if w is not None:
                est.rational = (p % q, q)
                est.witness = w
                break
    return est


def _pullbacks(cmap, copy, points, q):
    """``S^{-j}(points)`` for ``j < q``."""
    if points is None or q <= 1:
        return points
    kind, cum, fa, fb = cmap.inverse_kernel(copy)
    out = [points]
    cur = points
    for _ in range(q - 1):
        cur = _kernels.iterate_many(kind, cum, fa, fb, cur, 1, cmap.eps)
        out.append(cur)
    return np.concatenate(out)


def _displacement_fn(cmap, copy, p, q, tol):
    """``g`` whose zeros are the period-``q`` points of lift type ``p``."""
    kernel = cmap.orbit_kernel(copy)
    L = cmap.length
    if q == 1:

        def g(s):
            s = np.atleast_1d(s)
            end = _kernels.iterate_many(*kernel, s % L, 1, cmap.eps)
            return (end - s + 0.5 * L) % L - 0.5 * L

    else:

        def g(s):
            lift = _kernels.lift_many(*kernel, np.atleast_1d(s) % L, q, cmap.eps, tol)
            return lift - p * L

    return g


def _periodic_error(cmap, copy, q, s):
    end = _kernels.iterate_many(*cmap.kernel(copy), np.array([s]), q, cmap.eps)[0]
    return circular_distance(end, s, cmap.length)


def _bisect(g, a, b, ga, tol_x, iters=200):
    for _ in range(iters):
        if b - a <= tol_x:
            break
        c = 0.5 * (a + b)
        gc = g(c)[0]
        if gc == 0:
            return c
        if (gc > 0) == (ga > 0):
            a, ga = c, gc
        else:
            b = c
    return 0.5 * (a + b)


def find_periodic(
    cmap,
    copy: int,
    p: int,
    q: int,
    m: int = DEFAULT_GRID,
    tol: Optional[float] = None,
    extra=None,
) -> Optional[float]:
    """A point ``s`` with ``S^q(s) = s`` whose orbit turns ``p`` times, or None.

    Seeds are a uniform grid, the fixed points of both foliations and (for
    polygons) the pullbacks of the affinity breakpoints, so that orbits
    through vertices and neutral intervals are not missed.
    """
    L = cmap.length
    tol = TOL_REL * L if tol is None else tol
    parts = [np.linspace(0.0, L, m, endpoint=False), cmap.seeds(copy)]
    pb = _pullbacks(cmap, copy, cmap.breakpoints(copy), q)
    if pb is not None:
        parts.append(pb)
    if extra is not None:
        parts.append(np.asarray(extra, dtype=float))
    seeds = unique_circular(np.concatenate(parts), L, 1e-13 * L)
    g = _displacement_fn(cmap, copy, p, q, tol)
    vals = g(seeds)
    for i in np.argsort(np.abs(vals))[:8]:
        if abs(vals[i]) <= tol and _periodic_error(cmap, copy, q, seeds[i]) <= tol:
            return float(seeds[i])
    xs = np.append(seeds, seeds[0] + L)
    gs = np.append(vals, vals[0])
    lim = 0.25 * L
    for i in range(len(seeds)):
        ga, gb = gs[i], gs[i + 1]
        if ga * gb < 0 and abs(ga) < lim and abs(gb) < lim:
            r = _bisect(g, xs[i], xs[i + 1], ga, 1e-15 * L) % L
            if _periodic_error(cmap, copy, q, r) <= tol:
                return float(r)
    return None


def fixed_points(cmap: ChessMap, tol: Optional[float] = None) -> list:
    """All fixed points of ``S`` (for ``theta1 != theta2``).

    Fixed points of ``S`` are exactly the common fixed points of the two
    involutions, so only the designated fixed points need checking.
    """
    L = cmap.length
    tol = TOL_REL * L if tol is None else tol
    out = []
    for f in cmap.foliations:
        for p in f.fixed.points:
            if (
                circular_distance(cmap.involution(1, p), p, L) <= tol
                and circular_distance(cmap.involution(2, p), p, L) <= tol
                and all(circular_distance(p, o, L) > tol for o in out)
            ):
                out.append(float(p))
    return out


def has_fixed_point(cmap: ChessMap, tol: Optional[float] = None) -> Optional[float]:
    """A fixed point of ``S``, or None."""
    pts = fixed_points(cmap, tol)
    return pts[0] if pts else None


def is_semi_stable(cmap, s0: float, copy: int = 1, delta: Optional[float] = None) -> bool:
    """True when ``S(s) - s`` has one strict sign on both sides of ``s0``."""
    L = cmap.length
    delta = 1e-6 * L if delta is None else delta
    xs = np.array([(s0 - delta) % L, (s0 + delta) % L])
    end = _kernels.iterate_many(*cmap.kernel(copy), xs, 1, cmap.eps)
    d = np.array([signed_circular(e - x, L) for e, x in zip(end, xs)])
    return bool(d[0] * d[1] > 0)


@dataclass(frozen=True)
class Connection:
    """A chord path joining fixed points of the two involutions.

    ``path`` lists the visited points ``(copy, s)`` starting at ``start``;
    ``length`` is the number of chords (0 for a common fixed point).
    """

    start: QPoint
    end: QPoint
    length: int
    path: tuple[QPoint, ...]


def detect_connection(cmap: ChessMap, max_steps: int = 1000, tol: Optional[float] = None) -> list:
    """All connections of at most ``max_steps`` chords."""
    L = cmap.length
    tol = TOL_REL * L if tol is None else tol
    kind = cmap.domain.kind
    out = []
    seen = set()
    for i in (0, 1):
        j = 1 - i
        fi, fj = cmap.foliations[i], cmap.foliations[j]
        pts_i = np.array(fi.fixed.points)
        pts_j = np.array(fj.fixed.points)
        for f in fi.fixed.points:
            # a point fixed by T_i starts on the copy whose involution is T_j
            start = QPoint(float(f), j + 1)
            if fj.fixed.is_designated(f, tol):
                key = (0, round(f / (tol * 10)))
                if key not in seen:
                    seen.add(key)
                    out.append(Connection(start, start, 0, (start,)))
                continue
            n = _kernels.connection_walk(kind, cmap._cum, fj.data, fi.data, float(f), max_steps, pts_j, pts_i, tol, cmap.eps)
            if n < 0:
                continue
            path = [start]
            x = start
            for _ in range(n):
                x = step_T(cmap, x)
                path.append(x)
            ends = sorted((round(start.s / (tol * 10)), round(x.s / (tol * 10))))
            key = (n, *ends)
            if key in seen:
                continue
            seen.add(key)
            out.append(Connection(start, x, n, tuple(path)))
    return out


@dataclass(frozen=True)
class Cylinder:
    """A family of period-``q`` points.

    ``lo, hi`` bound the base interval on ``Q_copy`` (equal for an isolated
    periodic orbit; ``hi`` may exceed ``L`` when the interval wraps).
    ``neutral`` marks intervals on which ``S^q`` is the identity.
    """

    lo: float
    hi: float
    period: int
    copy: int
    neutral: bool

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, s: float, L: float, tol: float) -> bool:
        d = (s - self.lo) % L
        return d <= self.width + tol or d >= L - tol


def neutral_cylinders(
    cmap: ChessMap,
    q: int,
    estimate: Optional[RotationEstimate] = None,
    copy: int = 1,
    tol: Optional[float] = None,
) -> list:
    """Periodic cylinders of ``S`` with period ``q`` on a polygon.

    Requires a confirmed rational rotation number ``p/q``. On each affine
    piece of ``S^q`` the lifted displacement is affine, so it either vanishes
    identically (a neutral piece) or has at most one zero (an isolated orbit).
    One cylinder is returned per orbit of components.
    """
    bp = cmap.breakpoints(copy)
    if bp is None:
        raise ValueError("periodic cylinders are computed for polygons only")
    if estimate is None:
        estimate = rotation_number(cmap, copy)
    if estimate.rational is None or estimate.rational[1] != q:
        raise ValueError(f"rotation number is not confirmed rational with denominator {q}")
    L = cmap.length
    tol = TOL_REL * L if tol is None else tol
    p = round(estimate.lift_value * q)
    g = _displacement_fn(cmap, copy, p, q, tol)
    pts = unique_circular(_pullbacks(cmap, copy, bp, q), L, 1e-11 * L)
    ends = np.append(pts[1:], pts[0] + L)
    gp = g(pts)
    gm = g(0.5 * (pts + ends))
    zero = np.abs(gp) <= tol
    nz = len(pts)
    flat = np.array([zero[i] and zero[(i + 1) % nz] and abs(gm[i]) <= tol for i in range(nz)])

    comps = []  # (lo, hi, neutral)
    if flat.all():
        comps.append((0.0, L, True))
    else:
        # runs of neutral pieces, starting after a non-neutral piece
        first = int(np.argmin(flat))
        i = 0
        while i < nz:
            k = (first + 1 + i) % nz
            if flat[k]:
                lo = pts[k]
                span = 0.0
                while i < nz and flat[(first + 1 + i) % nz]:
                    kk = (first + 1 + i) % nz
                    span += ends[kk] - pts[kk]
                    i += 1
                comps.append((float(lo), float(lo + span), True))
            else:
                i += 1
        for k in range(nz):
            prev = (k - 1) % nz
            if zero[k] and not flat[k] and not flat[prev]:
                comps.append((float(pts[k]), float(pts[k]), False))
            if not flat[k] and not zero[k] and not zero[(k + 1) % nz]:
                ga, gb = gp[k], gp[(k + 1) % nz]
                if ga * gb < 0 and abs(ga) < 0.25 * L and abs(gb) < 0.25 * L:
                    r = _bisect(g, pts[k], ends[k], ga, 1e-15 * L) % L
                    if _periodic_error(cmap, copy, q, r) <= tol:
                        comps.append((float(r), float(r), False))

    # group components lying on the same periodic orbit
    cyl = [Cylinder(lo, hi, q, copy, nt) for lo, hi, nt in comps]
    kernel = cmap.kernel(copy)
    parent = list(range(len(cyl)))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    los = np.array([c.lo for c in cyl])
    widths = np.array([c.width for c in cyl])
    kinds = np.array([c.neutral for c in cyl], dtype=bool)
    for a, c in enumerate(cyl):
        if q == 1:
            break
        rep = (c.lo + 0.5 * c.width) % L
        orb = _kernels.orbit(*kernel, rep, q - 1, cmap.eps)[1:]
        # same test as Cylinder.contains, for all orbit points and components at once
        d = (orb[:, None] - los[None, :]) % L
        hit = ((d <= widths + 10 * tol) | (d >= L - 10 * tol)).any(axis=0) & (kinds == c.neutral)
        hit[a] = False
        for b in np.flatnonzero(hit):
            parent[find(a)] = find(int(b))
    groups = {}
    for a in range(len(cyl)):
        groups.setdefault(find(a), []).append(cyl[a])
    return [min(g_, key=lambda c: c.lo) for g_ in groups.values()]


def triangle_classify(cmap: ChessMap) -> tuple[int, float]:
    """Period (1, 2 or 3) of a periodic orbit of ``S`` on a triangle, with a witness."""
    fp = has_fixed_point(cmap)
    if fp is not None:
        return 1, fp
    for q in (2, 3):
        for p in range(1, q):
            w = find_periodic(cmap, 1, p, q)
            if w is not None:
                return q, w
    raise RuntimeError(f"no periodic orbit of period <= 3 found for {cmap!r}")


def omega_limit_sample(cmap, x: QPoint, burn_in: int = 10_000, n: int = 10_000) -> np.ndarray:
    """Sorted orbit tail of ``x``, approximating its omega-limit set."""
    kernel = cmap.kernel(x.copy)
    s = float(x.s)
    if burn_in:
        s = float(_kernels.iterate_many(*kernel, np.array([s]), int(burn_in), cmap.eps)[0])
    return np.sort(_kernels.orbit(*kernel, s, int(n) - 1, cmap.eps))


def orbit(cmap: ChessMap, x: QPoint, n: int) -> list:
    """``n`` steps of ``T`` from ``x``, including ``x``."""
    out = [x]
    for _ in range(n):
        x = step_T(cmap, x)
        out.append(x)
    return out
