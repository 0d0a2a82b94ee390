"""Command line interface: ``chessbilliard <command> [options]``."""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

from . import io
from .dynamics import DEFAULT_ITERS, DEFAULT_QMAX, ChessMap, rotation_number, step_S, step_T
from .geometry import GeometryError, QPoint, domain_from_json, normalize_angle

_PI = re.compile(r"^\s*(?P<num>[-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$")


def parse_angle(text: str) -> float:
    """Radians, ``atan:a/b`` or a multiple of pi such as ``3pi/4``."""
    t = text.strip()
    if t.startswith("atan:"):
        frac = t[5:]
        if "/" in frac:
            a, b = frac.split("/", 1)
            value = math.atan2(float(a), float(b))
        else:
            value = math.atan(float(frac))
        return normalize_angle(value)
    m = _PI.match(t)
    if m:
        num = m.group("num")
        k = 1.0 if num in ("", "+") else -1.0 if num == "-" else float(num)
        return k * math.pi / float(m.group("den") or 1)
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None


def parse_range(text: str) -> tuple[float, float]:
    lo, hi = text.split(":")
    return parse_angle(lo), parse_angle(hi)


def parse_grid(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)[xX](\d+)", text.strip())
    if not m or int(m.group(1)) < 1 or int(m.group(2)) < 1:
        raise argparse.ArgumentTypeError(f"grid must look like WxH, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def load_domain(text: str):
    p = Path(text)
    if not text.lstrip().startswith("{") and p.exists():
        text = p.read_text()
    return domain_from_json(text)


def _figure_path(out) -> Path:
    return Path(out).with_suffix(".png")


def _emit(lines, out):
    if out:
        Path(out).write_text("".join(line + "\n" for line in lines))
    else:
        for line in lines:
            print(line)


def cmd_orbit(args) -> int:
    domain = load_domain(args.domain)
    cmap = ChessMap(domain, args.theta1, args.theta2)
    x = QPoint(args.start % domain.length, args.copy)
    advance = step_S if args.map == "S" else step_T
    pts = [x]
    for _ in range(args.steps):
        pts.append(advance(cmap, pts[-1]))
    lines = []
    for k, p in enumerate(pts):
        xy = domain.point(p.s)
        lines.append(json.dumps({"step": k, "copy": p.copy, "s": p.s, "x": xy[0], "y": xy[1]}))
    _emit(lines, args.out)
    if args.out and not args.no_figure:
        from .plotting import plot_orbit

        full = pts if args.map == "T" else [q for p in pts for q in (p, step_T(cmap, p))][:-1]
        plot_orbit(domain, full, _figure_path(args.out))
    return 0


def cmd_rho(args) -> int:
    domain = load_domain(args.domain)
    cmap = ChessMap(domain, args.theta1, args.theta2)
    est = rotation_number(cmap, args.copy, n=args.iters, q_max=args.qmax, tol=args.tol)
    pq = f"{est.rational[0]}/{est.rational[1]}" if est.rational else "unresolved"
    print(f"rho={est.value:.6f} p/q={pq}")
    record = {"theta1": cmap.theta1, "theta2": cmap.theta2, "copy": args.copy, **est.to_dict(), "witness": est.witness}
    print(json.dumps(record))
    if args.out:
        io.write_json(record, args.out)
    return 0


def cmd_scan(args) -> int:
    from .scan import scan

    domain = load_domain(args.domain)
    grid = scan(
        domain,
        args.theta1_range,
        args.theta2_range,
        shape=args.grid,
        n=args.iters,
        q_max=args.qmax,
        copy=args.copy,
    )
    out = Path(args.out)
    if args.format == "csv":
        io.write_csv(grid, out)
        io.write_pgm(grid, out.with_suffix(".pgm"))
    elif args.format == "pgm":
        io.write_pgm(grid, out)
    else:
        io.write_grid_json(grid, out)
    summary = io.grid_summary(grid)
    io.write_json(summary, io.sidecar_path(out))
    if not args.no_figure:
        from .plotting import plot_grid

        plot_grid(grid, _figure_path(out))
    w, h = args.grid
    print(f"scan {w}x{h}: {w * h} cells, confirmed rational {summary['confirmed_fraction']:.3f} -> {out}")
    return 0


def cmd_tongue(args) -> int:
    from .scan import tongue_boundary

    domain = load_domain(args.domain)
    tb = tongue_boundary(domain, args.theta2, args.p, args.q, args.bracket, tol=args.tol, n=args.iters, copy=args.copy)
    record = {
        "theta2": tb.theta2,
        "p": tb.p,
        "q": tb.q,
        "lo": tb.lo,
        "hi": tb.hi,
        "width": tb.width,
        "edge": tb.edge,
        "inner": tb.inner,
        "inner_confirmed": tb.inner_confirmed,
    }
    print(f"edge of {tb.p}/{tb.q} plateau at theta1={tb.edge:.10f} (width {tb.width:.1e})")
    print(json.dumps(record))
    if args.out:
        io.write_json(record, args.out)
    return 0


def cmd_square_f(args) -> int:
    from .square import f_graph, f_model, f_rotation_number, phis

    if args.phi1 is not None and args.phi2 is not None:
        phi1, phi2 = args.phi1, args.phi2
    else:
        phi1, phi2 = phis(args.theta1, args.theta2)
    model = f_model(phi1, phi2)
    est = f_rotation_number(phi1, phi2, n=args.iters, q_max=args.qmax)
    record = {**model.to_json(), "branch": model.branch, **est.to_dict()}
    print(json.dumps(record))
    if args.out:
        io.write_json(record, args.out)
        if not args.no_figure:
            from .plotting import plot_f_graph

            zs, fz = f_graph(phi1, phi2)
            plot_f_graph(zs, fz, model, _figure_path(args.out))
    return 0


def cmd_verify(args) -> int:
    from .verify import run_all

    only = set(args.only) if args.only else None
    results = run_all(seed=args.seed, only=only, echo=lambda s: print(s, flush=True))
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed" + (f"; failed: {failed}" if failed else ""))
    if args.out:
        io.write_json([r.__dict__ for r in results], args.out)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chessbilliard", description="Chess billiard boundary dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, directions=False, out=None, tol=None):
        # parent parsers share Action objects, so each command gets its own
        p = sub.add_parser(name, help=help)
        p.add_argument("--domain", default='{"kind": "square"}', help="domain JSON, inline or a file path")
        p.add_argument("--iters", type=positive_int, default=DEFAULT_ITERS)
        p.add_argument("--qmax", type=positive_int, default=DEFAULT_QMAX)
        p.add_argument("--tol", type=positive_float, default=tol)
        p.add_argument("--copy", type=int, choices=(1, 2), default=1)
        p.add_argument("--out", default=out)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--no-figure", action="store_true", help="skip the PNG written next to --out")
        if directions:
            p.add_argument("--theta1", type=parse_angle, required=True)
            p.add_argument("--theta2", type=parse_angle, required=True)
        return p

    p = add("orbit", "dump an orbit as JSON lines", directions=True)
    p.add_argument("--start", type=float, default=0.0, help="boundary parameter of the start point")
    p.add_argument("--steps", type=positive_int, default=6)
    p.add_argument("--map", choices=("T", "S"), default="T")
    p.set_defaults(func=cmd_orbit)

    p = add("rho", "rotation number of S", directions=True)
    p.set_defaults(func=cmd_rho)

    p = add("scan", "rotation numbers over a grid of directions", out="scan.csv")
    p.add_argument("--grid", type=parse_grid, default=(50, 50))
    p.add_argument("--theta1-range", type=parse_range, default=(0.0, math.pi))
    p.add_argument("--theta2-range", type=parse_range, default=(0.0, math.pi))
    p.add_argument("--format", choices=("csv", "json", "pgm"), default="csv")
    p.set_defaults(func=cmd_scan)

    p = add("tongue", "bisect an edge of a rational plateau", tol=1e-6)
    p.add_argument("--theta2", type=parse_angle, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=positive_int, required=True)
    p.add_argument("--bracket", type=parse_range, required=True, help="lo:hi in theta1")
    p.set_defaults(func=cmd_tongue)

    p = add("square-f", "the square's diagonal map F")
    p.add_argument("--phi1", type=parse_angle)
    p.add_argument("--phi2", type=parse_angle)
    p.add_argument("--theta1", type=parse_angle, default=None)
    p.add_argument("--theta2", type=parse_angle, default=None)
    p.set_defaults(func=cmd_square_f)

    p = add("verify", "run the acceptance checks")
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "square-f" and (args.phi1 is None or args.phi2 is None):
        if args.theta1 is None or args.theta2 is None:
            parser.error("square-f needs --phi1/--phi2 or --theta1/--theta2")
    try:
        return args.func(args)
    except (GeometryError, ValueError, RuntimeError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"chessbilliard {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
