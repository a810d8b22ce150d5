"""Optional matplotlib renderings of report tables.

The delimited files are the canonical outputs; these figures are a
convenience layer over the same data, rendered headlessly to PNG next to
the tables. Nothing here feeds back into any computation.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be fixed first)
import numpy as np  # noqa: E402

_META = {"Software": "liouville-lab"}


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_META)
    plt.close(fig)
    return path


def plot_trace(sol, path) -> Path:
    """Shooting trace: profile v(t) and running mass."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.plot(sol.grid, sol.v, lw=1.2)
    ax1.set_xlabel("t = log r")
    ax1.set_ylabel("v")
    ax2.plot(sol.grid, sol.mass, lw=1.2, label="mass")
    ax2.plot(sol.grid, sol.slope, lw=1.0, ls="--", label="slope")
    ax2.set_xlabel("t = log r")
    ax2.legend(frameon=False)
    return _finish(fig, path)


def plot_mass_curves(curves, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for curve in curves:
        a = [s.a for s in curve.samples if s.converged]
        b = [s.beta for s in curve.samples if s.converged]
        line, = ax.plot(a, b, lw=1.2, label=f"alpha = {curve.alpha:g}")
        if curve.a_star is not None:
            ax.plot([curve.a_star], [curve.beta_bar], "o", ms=4,
                    color=line.get_color())
    ax.set_xlabel("central value a")
    ax.set_ylabel("total mass (beta units)")
    ax.legend(frameon=False)
    return _finish(fig, path)


def plot_collapse(report, path) -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    series = report.plateau_series()
    if series:
        eps = [e for e, _ in series]
        plateau = [p for _, p in series]
        ax1.semilogx(eps, plateau, "o-", lw=1.2)
    ax1.axhline(4.0, color="k", lw=0.8, ls=":")
    ax1.invert_xaxis()
    ax1.set_xlabel("eps")
    ax1.set_ylabel("local mass at the probe radius")
    for record in report.run.records:
        if record.found:
            ax2.plot(record.profile_t, record.profile_mass, lw=0.9,
                     label=f"eps = {record.eps:.0e}")
    ax2.set_xlabel("t = log r")
    ax2.set_ylabel("cumulative mass")
    ax2.legend(frameon=False, fontsize=7)
    return _finish(fig, path)


def plot_limit_profile(profile, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    xi = -4.0 * profile.grid + profile.v
    ax.plot(profile.grid, profile.v, lw=1.2, label="regular part")
    ax.plot(profile.grid, xi, lw=1.2, ls="--", label="singular limit")
    ax.set_xlabel("t = log r")
    ax.legend(frameon=False)
    return _finish(fig, path)


def plot_disk(sol, path) -> Path:
    grid = sol.problem.grid
    fig, ax = plt.subplots(figsize=(6, 4.2))
    theta = np.append(grid.theta_nodes(), 2.0 * math.pi)
    u = np.column_stack([sol.u, sol.u[:, :1]])
    mesh = ax.pcolormesh(theta, grid.t_nodes(), u, shading="nearest")
    fig.colorbar(mesh, ax=ax, label="u")
    ax.set_xlabel("theta")
    ax.set_ylabel("t = log r")
    return _finish(fig, path)


def plot_scaling(report, path) -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    t = [s.t for s in report.steps]
    ax1.semilogx(t, [s.lambda_t for s in report.steps], "o-", lw=1.2)
    ax1.invert_xaxis()
    ax1.set_xlabel("vortex separation t")
    ax1.set_ylabel("rescaled height")
    ax2.semilogx(t, [s.combination for s in report.steps], "o-", lw=1.2)
    ax2.invert_xaxis()
    ax2.set_xlabel("vortex separation t")
    ax2.set_ylabel("height + scaling correction")
    fig.suptitle(report.label, fontsize=9)
    return _finish(fig, path)
