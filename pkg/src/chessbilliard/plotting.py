"""Figures written next to the CLI's data files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .scan import ScanGrid  # noqa: E402

# fixed metadata keeps repeated renders byte-identical
_META = {"Software": None}


def _save(fig, path):
    fig.savefig(path, dpi=110, metadata=_META)
    plt.close(fig)


def plot_grid(grid: ScanGrid, path) -> None:
    """Heatmap of the rotation number with unresolved cells hatched out."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    extent = (*grid.x_range, *grid.y_range)
    im = ax.imshow(grid.rho, origin="lower", extent=extent, aspect="auto", cmap="viridis", vmin=0, vmax=1)
    unresolved = np.ma.masked_where(grid.confirmed, np.ones_like(grid.rho))
    ax.imshow(unresolved, origin="lower", extent=extent, aspect="auto", cmap="Greys", alpha=0.25, vmin=0, vmax=1)
    ax.set_xlabel(grid.meta.get("x", "theta1"))
    ax.set_ylabel(grid.meta.get("y", "theta2"))
    fig.colorbar(im, ax=ax, label="rotation number")
    _save(fig, path)


def plot_f_graph(zs, fz, model, path) -> None:
    """Graph of the diagonal map with the model's break points marked."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    L = np.sqrt(2.0)
    ax.plot(zs, fz, ".", ms=1.5, color="tab:blue")
    for s in model.starts[1:]:
        ax.axvline(s, color="0.6", lw=0.8, ls="--")
    ax.plot([0, L], [L, 0], ":", color="0.4", lw=0.8)
    ax.set_xlim(0, L)
    ax.set_ylim(0, L)
    ax.set_aspect("equal")
    ax.set_xlabel("z")
    ax.set_ylabel("F(z)")
    ax.set_title(f"phi1={model.phi1:.4f}, phi2={model.phi2:.4f}")
    _save(fig, path)


def plot_orbit(domain, points, path) -> None:
    """Boundary of the domain with the chords of a ``T`` orbit."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    if hasattr(domain, "vertices"):
        xy = np.asarray(domain.vertices)
    else:
        xy = domain.points(np.linspace(0.0, domain.length, 400, endpoint=False))
    ax.fill(xy[:, 0], xy[:, 1], color="0.93", ec="0.3")
    pts = domain.points([p.s for p in points])
    ax.plot(pts[:, 0], pts[:, 1], "-", lw=0.6, color="tab:red")
    ax.plot(pts[:1, 0], pts[:1, 1], "o", color="tab:red", ms=4)
    ax.set_aspect("equal")
    ax.axis("off")
    _save(fig, path)
