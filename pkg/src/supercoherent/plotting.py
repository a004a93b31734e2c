"""File-output figure rendering for the CLI report paths.

matplotlib is imported lazily with the Agg backend so that library use and
data-only CLI runs never pay for (or require a working) display stack.
Figures are written alongside the delimited data they illustrate.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .analysis import DivergenceFit, ParamGrid, SweepRow
from .observables import uncertainty
from .states import mixed_state
from .susy_core import theta_operator

__all__ = ["render_sweep", "render_fit", "render_paramgrid"]

_REGION_ORDER = ("Degenerate", "Singular", "GenericBounded", "GenericUnbounded")
_REGION_COLORS = ("#d62728", "#9467bd", "#1f77b4", "#ff7f0e")


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_sweep(rows: list[SweepRow], path: str) -> str:
    """Heat map of the variance product over the (theta, |z|) grid."""
    plt = _plt()
    thetas = np.array(sorted({r.theta for r in rows}))
    zmags = np.array(sorted({r.zmag for r in rows}))
    grid = np.full((zmags.size, thetas.size), np.nan)
    ti = {t: i for i, t in enumerate(thetas)}
    zi = {z: i for i, z in enumerate(zmags)}
    for r in rows:
        grid[zi[r.zmag], ti[r.theta]] = r.product if r.ok else np.nan
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    mesh = ax.pcolormesh(thetas, zmags, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="variance product")
    ax.set_xlabel("theta (rad)")
    ax.set_ylabel("|z|")
    ax.set_title("uncertainty product over the theta family")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_fit(fit: DivergenceFit, path: str) -> str:
    """Log-log plot of the fitted points and the power-law line."""
    plt = _plt()
    zmags = np.geomspace(fit.zmag_window[0], fit.zmag_window[1], fit.points)
    prods = np.empty_like(zmags)
    k = theta_operator(fit.theta)
    for i, zm in enumerate(zmags):
        s = mixed_state(k, zm * cmath.exp(1j * fit.zarg), 0.0, math.pi / 4.0, math.pi / 4.0)
        prods[i] = uncertainty(s).product
    line = np.exp(fit.intercept) * zmags**fit.slope
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(zmags, prods, "o", label="evaluated")
    ax.loglog(zmags, line, "-", label=f"slope {fit.slope:.3f}")
    ax.set_xlabel("|z|")
    ax.set_ylabel("variance product")
    ax.set_title(f"divergence fit, theta={fit.theta:.4f}, arg z={fit.zarg:.4f}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_paramgrid(grid: ParamGrid, path: str) -> str:
    """Region map of the central k4 slice of the classification grid."""
    plt = _plt()
    mid = grid.k4_vals.size // 2
    slab = grid.tags[:, :, mid]
    codes = np.zeros(slab.shape, dtype=int)
    for code, name in enumerate(_REGION_ORDER):
        codes[slab == name] = code
    from matplotlib.colors import ListedColormap

    fig, ax = plt.subplots(figsize=(6.5, 5.0))
    ax.pcolormesh(
        grid.k3_vals,
        grid.k2_vals,
        codes,
        shading="nearest",
        cmap=ListedColormap(_REGION_COLORS),
        vmin=-0.5,
        vmax=len(_REGION_ORDER) - 0.5,
    )
    handles = [
        plt.Line2D([], [], marker="s", linestyle="", color=c, label=n)
        for n, c in zip(_REGION_ORDER, _REGION_COLORS)
    ]
    ax.legend(handles=handles, loc="upper right", fontsize=8)
    ax.set_xlabel("k3")
    ax.set_ylabel("k2")
    ax.set_title(f"regions at k1=1, k4={grid.k4_vals[mid]:.3f}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
