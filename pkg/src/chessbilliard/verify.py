"""Acceptance checks shared by the test suite and ``chessbilliard verify``.

Each check returns a :class:`CheckResult`; checks never loosen their
tolerances, and a failing check reports what it measured.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .dynamics import (
    ChessMap,
    detect_connection,
    fixed_points,
    is_semi_stable,
    neutral_cylinders,
    omega_limit_sample,
    rotation_number,
    triangle_classify,
)
from .geometry import (
    Circle,
    Ellipse,
    Polygon,
    QPoint,
    affinity_breakpoints,
    circular_distance,
    random_convex_polygon,
)
from .scan import irrational_witness, proximity_fraction, scan_square_f
from .square import SQRT2, bound_constant, closed_form_a1, crossing_length, f_dphi2, f_geometric, f_model

N = 100_000
TOL = 1e-9


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _circ1(d: float) -> float:
    return abs((d + 0.5) % 1.0 - 0.5)


def _circ(d: float, L: float) -> float:
    return abs((d + 0.5 * L) % L - 0.5 * L)


def check_circle_law(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    circle = Circle(1.0)
    worst = 0.0
    for _ in range(100):
        t1, t2 = rng.uniform(0, math.pi, 2)
        est = rotation_number(ChessMap(circle, t1, t2), 1, n=N, identify=False)
        exact = ((t2 - t1) / math.pi) % 1.0
        worst = max(worst, _circ1(est.value - exact))
    bound = 1 / N + 1e-9
    cm = ChessMap(circle, 0.0, math.pi / 3)
    r1, r2 = rotation_number(cm, 1).rational, rotation_number(cm, 2).rational
    ok = worst <= bound and r1 == (1, 3) and r2 == (2, 3)
    return ok, f"max |rho - frac(alpha/pi)| = {worst:.2e} (bound {bound:.2e}); alpha=pi/3: copy1 {r1}, copy2 {r2}"


def check_square_period_two(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    sq = Polygon.square()
    cm = ChessMap(sq, math.pi / 4, 3 * math.pi / 4)
    worst = 0.0
    for copy in (1, 2):
        s = rng.uniform(0, sq.length, 1000)
        back = _kernels.iterate_many(*cm.kernel(copy), s, 2, cm.eps)
        worst = max(worst, max(circular_distance(a, b, sq.length) for a, b in zip(s, back)))
    return worst <= TOL, f"max |S^2(s) - s| over 2x1000 points = {worst:.2e}"


def check_square_period_three(seed: int = 0) -> tuple[bool, str]:
    sq = Polygon.square()
    cm = ChessMap(sq, math.atan(1 / 3), math.pi - math.atan(2 / 3))
    s0 = sq.param((1.0, 0.5))
    gaps = []
    for copy in (1, 2):
        end = _kernels.iterate_many(*cm.kernel(copy), np.array([s0]), 3, cm.eps)[0]
        gaps.append(circular_distance(end, s0, sq.length))
    est2 = rotation_number(cm, 2)
    est1 = rotation_number(cm, 1)
    ok = max(gaps) <= TOL and est2.rational == (1, 3)
    return ok, (
        f"|S^3(1,1/2) - (1,1/2)| = {max(gaps):.2e}; copy 2 confirms {est2.rational}, copy 1 confirms {est1.rational}"
    )


def check_intermediate_values(seed: int = 0) -> tuple[bool, str]:
    targets = [0.35, 0.40, 0.45, (math.sqrt(5) - 1) / 2 - 0.25]
    parts, ok = [], True
    for t in targets:
        w = irrational_witness(t, tol=1e-4, n=N)
        d = abs(w.estimate.value - t)
        ok &= d <= 1e-4
        parts.append(f"{t:.4f}@lam={w.lam:.6f} ({d:.1e})")
    return ok, "; ".join(parts)


def _random_triangle_directions(rng, tri):
    v = tri.vertices
    sides = [math.atan2(*(v[(i + 1) % 3] - v[i])[::-1]) for i in range(3)]
    out = []
    for _ in range(2):
        out.append(sides[rng.integers(3)] if rng.random() < 0.25 else rng.uniform(0, math.pi))
    if rng.random() < 0.05:
        out[1] = out[0]
    return out


def check_triangles(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    counts = {1: 0, 2: 0, 3: 0}
    failures = 0
    exceptional = 0
    for _ in range(1000):
        tri = random_convex_polygon(rng, 3)
        t1, t2 = _random_triangle_directions(rng, tri)
        cm = ChessMap(tri, t1, t2)
        exceptional += tri.is_exceptional(cm.theta1) or tri.is_exceptional(cm.theta2)
        try:
            q, w = triangle_classify(cm)
        except RuntimeError:
            failures += 1
            continue
        end = _kernels.iterate_many(*cm.kernel(1), np.array([w]), q, cm.eps)[0]
        if circular_distance(end, w, tri.length) > TOL * tri.length:
            failures += 1
            continue
        counts[q] += 1
    return failures == 0, f"periods {counts}, {exceptional} exceptional, {failures} failures"


def _random_domain(rng):
    kind = rng.integers(3)
    if kind == 0:
        return Circle(rng.uniform(0.5, 2.0))
    if kind == 1:
        b = rng.uniform(0.3, 1.0)
        return Ellipse(b * rng.uniform(1.0, 3.0), b)
    return random_convex_polygon(rng, int(rng.integers(3, 9)))


def check_sum_rule(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    bound = 2 / N + 1e-6
    worst = 0.0
    for _ in range(100):
        dom = _random_domain(rng)
        cm = ChessMap(dom, *rng.uniform(0, math.pi, 2))
        r1 = rotation_number(cm, 1, n=N, identify=False).value
        r2 = rotation_number(cm, 2, n=N, identify=False).value
        worst = max(worst, _circ1(r1 + r2))
    return worst <= bound, f"max dist of rho1 + rho2 to an integer = {worst:.2e} (bound {bound:.2e})"


def _phi2(rng, branch):
    lo, hi = (0.01, math.pi / 4 - 0.01) if branch == "low" else (math.pi / 4 + 0.01, math.pi / 2 - 0.01)
    return rng.uniform(lo, hi)


def check_f_oracle(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(10_000):
        phi1 = rng.uniform(0.01, math.pi / 2 - 0.01)
        phi2 = _phi2(rng, "low" if i % 2 else "high")
        z = rng.uniform(0, SQRT2)
        worst = max(worst, _circ(f_model(phi1, phi2)(z) - f_geometric(phi1, phi2, z), SQRT2))
    a1_err = 0.0
    for branch in ("low", "high"):
        for _ in range(50):
            phi1, phi2 = rng.uniform(0.05, math.pi / 2 - 0.05), _phi2(rng, branch)
            a1_err = max(a1_err, abs(crossing_length(phi1, phi2) - closed_form_a1(phi1, phi2)))
    sym_err = 0.0
    for _ in range(1000):
        phi1, phi2 = rng.uniform(0.01, math.pi / 2 - 0.01), _phi2(rng, "high")
        m = f_model(phi1, phi2)
        a1, a2, a3 = m.a
        bps = [0.0, a1, a1 + a2, SQRT2]
        img = [f_geometric(phi1, phi2, b % SQRT2) for b in bps]
        lens = [(img[i + 1] - img[i]) % SQRT2 for i in range(3)]
        sym_err = max(sym_err, abs(lens[0] - a1), abs(lens[1] - a3), abs(lens[2] - a2))
    ok = worst <= 1e-9 * SQRT2 and a1_err <= 1e-9 and sym_err <= 1e-9
    return ok, f"sup|model - geometric| = {worst:.1e}; a1 vs closed form {a1_err:.1e}; symmetry {sym_err:.1e}"


def check_derivative_bound(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    h = 1e-6
    bad, excess, positive = 0, 0.0, 0
    samples = 0
    while samples < 1000:
        phi1 = rng.uniform(0.01, math.pi / 2 - 0.01)
        phi2 = rng.uniform(math.pi / 4 + 2 * h, math.pi / 2 - 0.01)
        z = rng.uniform(0, SQRT2)
        d = f_dphi2(phi1, phi2, z, h)
        c = bound_constant(phi1)
        samples += 1
        if d > c + 1e-3:
            bad += 1
            excess = max(excess, d - c)
        positive += d > 1e-6
    return bad == 0, (
        f"{bad}/{samples} samples exceed C + 1e-3 (max excess {excess:.3f}); "
        f"{positive} with dF/dphi2 > 0"
    )


def check_affinity_bound(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst_bp, worst_cyl, rational = -math.inf, -math.inf, 0
    ok = True
    for k in range(3, 11):
        for _ in range(15):
            poly = random_convex_polygon(rng, k)
            t1, t2 = rng.uniform(0, math.pi, 2)
            cm = ChessMap(poly, t1, t2)
            for copy in (1, 2):
                nb = len(affinity_breakpoints(poly, t1, t2, copy))
                worst_bp = max(worst_bp, nb - (3 * k - 4))
                ok &= nb <= 3 * k - 4
            est = rotation_number(cm, 1, n=N)
            if est.rational is not None:
                rational += 1
                cyl = neutral_cylinders(cm, est.rational[1], est)
                worst_cyl = max(worst_cyl, len(cyl) - (3 * k - 4))
                ok &= len(cyl) <= 3 * k - 4
    return ok, (
        f"max(#breakpoints - (3k-4)) = {worst_bp}; max(#cylinders - (3k-4)) = {worst_cyl} "
        f"over {rational} confirmed-rational maps"
    )


def check_fixed_point_dichotomy(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    ellipse_hits = 0
    for _ in range(100):
        b = rng.uniform(0.3, 1.0)
        el = Ellipse(b * rng.uniform(1.0, 3.0), b)
        t1, t2 = rng.uniform(0, math.pi, 2)
        if fixed_points(ChessMap(el, t1, t2)):
            ellipse_hits += 1
    sq = Polygon.square()
    missing, unstable = 0, 0
    for _ in range(100):
        base = 0.0 if rng.random() < 0.5 else math.pi / 2
        t1, t2 = base + rng.uniform(0.01, math.pi / 2 - 0.01, 2)
        cm = ChessMap(sq, t1, t2)
        pts = fixed_points(cm)
        if len(pts) != 2:
            missing += 1
        unstable += sum(not is_semi_stable(cm, p) for p in pts)
    ok = ellipse_hits == 0 and missing == 0 and unstable == 0
    return ok, f"ellipse fixed points: {ellipse_hits}/100; square missing: {missing}/100; not semi-stable: {unstable}"


def check_connections(seed: int = 0, size: int = 50) -> tuple[bool, str]:
    sq = Polygon.square()
    centers = (np.arange(size) + 0.5) * math.pi / size
    with_conn, conn_bad, neutral_cells, neutral_bad = 0, 0, 0, 0
    for t2 in centers:
        for t1 in centers:
            cm = ChessMap(sq, t1, t2)
            conns = detect_connection(cm)
            est = rotation_number(cm, 1, n=N)
            if conns:
                with_conn += 1
                if est.rational is None:
                    conn_bad += 1
            if est.rational is not None:
                cyl = neutral_cylinders(cm, est.rational[1], est)
                if any(c.neutral for c in cyl):
                    neutral_cells += 1
                    if not conns:
                        neutral_bad += 1
    ok = conn_bad == 0 and neutral_bad == 0
    return ok, (
        f"{with_conn} cells with connections ({conn_bad} without confirmed rational rho); "
        f"{neutral_cells} cells with neutral cylinders ({neutral_bad} without a connection)"
    )


def check_omega_symmetry(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < 20:
        b = rng.uniform(0.3, 1.0)
        el = Ellipse(b * rng.uniform(1.0, 3.0), b)
        cm = ChessMap(el, *rng.uniform(0, math.pi, 2))
        if rotation_number(cm, 1, n=N).rational is not None:
            continue
        sample = omega_limit_sample(cm, QPoint(float(rng.uniform(0, el.length)), 1), burn_in=10_000, n=N)
        L = el.length
        refl = np.sort((sample + math.pi) % L)
        idx = np.searchsorted(sample, refl) % len(sample)
        d = np.minimum(_circ_arr(refl - sample[idx], L), _circ_arr(refl - sample[idx - 1], L))
        worst = max(worst, float(d.max()) / L)
        done += 1
    return worst <= 1e-3, f"max one-sided Hausdorff distance / L = {worst:.2e} over 20 maps"


def _circ_arr(d, L):
    return np.abs((d + 0.5 * L) % L - 0.5 * L)


def check_open_dense(seed: int = 0, size: int = 200, threshold: float = 0.95, n: int = 10_000) -> tuple[bool, str]:
    grid = scan_square_f(shape=(size, size), n=n, q_max=50)
    frac = float(grid.confirmed.mean())
    near = proximity_fraction(grid.confirmed, radius=2)
    return near >= threshold, (
        f"{size}x{size} grid of F: confirmed rational (q<=50) {frac:.3f}; within 2 cells {near:.3f} "
        f"(threshold {threshold:.2f})"
    )


CHECKS: dict[int, tuple[str, Callable]] = {
    1: ("circle law", check_circle_law),
    2: ("square period 2", check_square_period_two),
    3: ("square period 3", check_square_period_three),
    4: ("intermediate values", check_intermediate_values),
    5: ("triangles periodic", check_triangles),
    6: ("sum rule", check_sum_rule),
    7: ("F dual oracle", check_f_oracle),
    8: ("derivative bound", check_derivative_bound),
    9: ("affinity bound", check_affinity_bound),
    10: ("fixed-point dichotomy", check_fixed_point_dichotomy),
    11: ("connections and periodicity", check_connections),
    12: ("omega-limit symmetry", check_omega_symmetry),
    13: ("open-dense proxy", check_open_dense),
}


def run_check(number: int, seed: int = 0, **kwargs) -> CheckResult:
    name, fn = CHECKS[number]
    t0 = time.perf_counter()
    try:
        ok, detail = fn(seed, **kwargs)
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CheckResult(number, name, bool(ok), detail, time.perf_counter() - t0)


def run_all(seed: int = 0, only=None, echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    out = []
    for number in sorted(CHECKS):
        if only and number not in only:
            continue
        res = run_check(number, seed)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
