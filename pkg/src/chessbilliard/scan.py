"""Sweeps over direction pairs: rotation-number grids, plateau edges, and
intermediate-value searches along a segment of directions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dynamics import (
    DEFAULT_ITERS,
    DEFAULT_QMAX,
    ChessMap,
    RotationEstimate,
    find_periodic,
    rotation_number,
)
from .geometry import Domain, Polygon, normalize_angle
from .square import f_model

SEGMENT_START = (math.pi / 4, 3 * math.pi / 4)
SEGMENT_END = (math.atan(1 / 3), math.pi - math.atan(2 / 3))


@dataclass
class ScanGrid:
    """Rotation numbers on a ``width x height`` grid of cell centres.

    Arrays are indexed ``[row, col]`` with rows along the second direction
    and columns along the first. ``p`` and ``q`` are -1 where no rational
    value was confirmed.
    """

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    rho: np.ndarray
    err: np.ndarray
    p: np.ndarray
    q: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rho.shape

    @property
    def xs(self) -> np.ndarray:
        return cell_centers(self.x_range, self.rho.shape[1])

    @property
    def ys(self) -> np.ndarray:
        return cell_centers(self.y_range, self.rho.shape[0])

    @property
    def confirmed(self) -> np.ndarray:
        return self.q > 0

    def rows(self):
        """``(x, y, rho, err, p, q)`` per cell in row-major order."""
        xs, ys = self.xs, self.ys
        for j in range(self.rho.shape[0]):
            for i in range(self.rho.shape[1]):
                p, q = int(self.p[j, i]), int(self.q[j, i])
                yield (
                    float(xs[i]),
                    float(ys[j]),
                    float(self.rho[j, i]),
                    float(self.err[j, i]),
                    p if q > 0 else None,
                    q if q > 0 else None,
                )


def cell_centers(rng: tuple[float, float], k: int) -> np.ndarray:
    lo, hi = rng
    return lo + (np.arange(k) + 0.5) * (hi - lo) / k


def _fill(xr, yr, shape, evaluate: Callable[[float, float], RotationEstimate], meta, progress=None):
    w, h = shape
    rho = np.zeros((h, w))
    err = np.zeros((h, w))
    p = np.full((h, w), -1, dtype=np.int64)
    q = np.full((h, w), -1, dtype=np.int64)
    xs, ys = cell_centers(xr, w), cell_centers(yr, h)
    for j in range(h):
        for i in range(w):
            est = evaluate(float(xs[i]), float(ys[j]))
            rho[j, i] = est.value
            err[j, i] = est.error_bound
            if est.rational is not None:
                p[j, i], q[j, i] = est.rational
        if progress is not None:
            progress(j + 1, h)
    return ScanGrid(tuple(xr), tuple(yr), rho, err, p, q, meta)


def scan(
    domain: Domain,
    theta1_range: tuple[float, float] = (0.0, math.pi),
    theta2_range: tuple[float, float] = (0.0, math.pi),
    shape: tuple[int, int] = (50, 50),
    n: int = DEFAULT_ITERS,
    q_max: int = DEFAULT_QMAX,
    m: int = 1024,
    copy: int = 1,
    progress=None,
) -> ScanGrid:
    """Rotation number of ``S`` on ``copy`` at every cell of the grid.

    Cells are evaluated in a fixed order, so the result depends only on the
    arguments. ``shape`` is ``(width, height)``.
    """
    meta = {
        "map": "S",
        "domain": domain.to_json(),
        "x": "theta1",
        "y": "theta2",
        "copy": copy,
        "iters": n,
        "qmax": q_max,
        "grid_m": m,
    }

    def evaluate(t1, t2):
        return rotation_number(ChessMap(domain, t1, t2), copy, n=n, q_max=q_max, m=m)

    return _fill(theta1_range, theta2_range, shape, evaluate, meta, progress)


def scan_square_f(
    shape: tuple[int, int] = (200, 200),
    n: int = 10_000,
    q_max: int = 50,
    m: int = 256,
    progress=None,
) -> ScanGrid:
    """Rotation number of the diagonal map ``F`` over ``(phi1, phi2)`` in ``(0, pi/2)^2``."""
    meta = {"map": "F", "domain": {"kind": "square"}, "x": "phi1", "y": "phi2", "iters": n, "qmax": q_max, "grid_m": m}

    def evaluate(phi1, phi2):
        fmap = f_model(phi1, phi2).circle_map()
        return rotation_number(fmap, 1, n=n, q_max=q_max, m=m)

    half = (0.0, math.pi / 2)
    return _fill(half, half, shape, evaluate, meta, progress)


def proximity_fraction(mask: np.ndarray, radius: int = 2) -> float:
    """Fraction of cells within ``radius`` cells (Chebyshev) of a marked cell."""
    h, w = mask.shape
    near = np.zeros_like(mask, dtype=bool)
    for dj in range(-radius, radius + 1):
        for di in range(-radius, radius + 1):
            src = mask[max(0, -dj) : h - max(0, dj), max(0, -di) : w - max(0, di)]
            near[max(0, dj) : h - max(0, -dj), max(0, di) : w - max(0, -di)] |= src
    return float(near.mean())


@dataclass(frozen=True)
class TongueBoundary:
    """An edge of the plateau ``{theta1 : rho = p/q}`` at fixed ``theta2``.

    ``inner`` is the bracket end on the plateau side and ``inner_confirmed``
    tells whether ``p/q`` was confirmed there (false when the plateau has
    no interior, as for rigid rotations).
    """

    theta2: float
    p: int
    q: int
    lo: float
    hi: float
    inner: float
    inner_confirmed: bool

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def edge(self) -> float:
        return 0.5 * (self.lo + self.hi)


def _circ1(d: float) -> float:
    return (d + 0.5) % 1.0 - 0.5


def plateau_class(
    domain: Domain, theta1: float, theta2: float, p: int, q: int, n: int = DEFAULT_ITERS, copy: int = 1
) -> int:
    """0 when ``rho = p/q`` is confirmed, otherwise the sign of ``rho - p/q``."""
    cmap = ChessMap(domain, theta1, theta2)
    est = rotation_number(cmap, copy, n=n, identify=False)
    d = _circ1(est.value - p / q)
    if abs(d) <= est.error_bound:
        lift_p = round(est.lift_value * q)
        if lift_p % q == p % q and find_periodic(cmap, copy, lift_p, q) is not None:
            return 0
    return 1 if d > 0 else -1


def tongue_boundary(
    domain: Domain,
    theta2: float,
    p: int,
    q: int,
    bracket: tuple[float, float],
    tol: float = 1e-6,
    n: int = DEFAULT_ITERS,
    copy: int = 1,
) -> TongueBoundary:
    """Bisect ``theta1`` inside ``bracket`` down to width ``tol``.

    The ends of the bracket must fall in different classes of
    :func:`plateau_class`; the bisection keeps them different, so it closes
    in on a plateau edge (or on the crossing point when there is no plateau).
    """
    lo, hi = bracket
    c_lo = plateau_class(domain, lo, theta2, p, q, n, copy)
    c_hi = plateau_class(domain, hi, theta2, p, q, n, copy)
    if c_lo == c_hi:
        raise ValueError(f"bracket {bracket} does not straddle an edge of the {p}/{q} plateau")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        c = plateau_class(domain, mid, theta2, p, q, n, copy)
        if c == c_lo:
            lo = mid
        else:
            hi, c_hi = mid, c
    if c_lo == 0:
        inner, ok = lo, True
    else:
        inner, ok = hi, c_hi == 0
    return TongueBoundary(normalize_angle(theta2), p, q, lo, hi, inner, ok)


@dataclass(frozen=True)
class Witness:
    """A direction pair on the segment with its rotation estimate."""

    lam: float
    theta1: float
    theta2: float
    estimate: RotationEstimate


def segment_point(lam: float) -> tuple[float, float]:
    """Direction pair at parameter ``lam`` of the segment from the period-2 to the period-3 pair."""
    return (
        SEGMENT_START[0] + lam * (SEGMENT_END[0] - SEGMENT_START[0]),
        SEGMENT_START[1] + lam * (SEGMENT_END[1] - SEGMENT_START[1]),
    )


def irrational_witness(
    target: float,
    tol: float = 1e-4,
    n: int = DEFAULT_ITERS,
    copy: int = 2,
    max_iter: int = 60,
    domain: Optional[Domain] = None,
) -> Witness:
    """Direction pair on the segment whose rotation estimate is within ``tol`` of ``target``.

    The segment joins ``(pi/4, 3pi/4)`` (rotation number 1/2) to
    ``(atan(1/3), pi - atan(2/3))`` (rotation number 1/3 on copy 2); the
    rotation number varies continuously along it, so bisection on the sign
    of ``rho - target`` closes in on the target.
    """
    if not (1 / 3 <= target <= 1 / 2):
        raise ValueError("target must lie in [1/3, 1/2]")
    domain = Polygon.square() if domain is None else domain

    def est(lam):
        t1, t2 = segment_point(lam)
        return Witness(lam, t1, t2, rotation_number(ChessMap(domain, t1, t2), copy, n=n, identify=False))

    a, b = est(0.0), est(1.0)
    for w in (a, b):
        if abs(w.estimate.value - target) <= tol:
            return w
    sign_a = a.estimate.value > target
    if sign_a == (b.estimate.value > target):
        raise RuntimeError("target is not bracketed by the segment end points")
    lo, hi = 0.0, 1.0
    best = a
    for _ in range(max_iter):
        mid = est(0.5 * (lo + hi))
        if abs(mid.estimate.value - target) < abs(best.estimate.value - target):
            best = mid
        if abs(mid.estimate.value - target) <= tol:
            return mid
        if (mid.estimate.value > target) == sign_a:
            lo = mid.lam
        else:
            hi = mid.lam
    return best
