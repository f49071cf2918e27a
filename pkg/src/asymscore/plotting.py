"""Figure rendering for CLI reports.

All figures are written straight to files (Agg backend); the harness
itself stays plot-free.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_heatmap(grid, path, title: str = ""):
    """Expected-loss heatmap with a star at the argmin cell."""
    fig, ax = plt.subplots(figsize=(6, 5))
    cells = np.where(np.isfinite(grid.cells), grid.cells, np.nan)
    mesh = ax.pcolormesh(grid.sigma_axis, grid.mu_axis, cells, shading="nearest",
                         cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="mean loss")
    ax.plot(grid.argmin_sigma, grid.argmin_mu, marker="*", color="white",
            markersize=16, markeredgecolor="black")
    ax.set_xlabel("sigma")
    ax.set_ylabel("mu")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_hedge_curve(sigmas, losses, sigma_star, path, title: str = ""):
    """Shifted expected loss against sigma, with the optimum marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sigmas, losses, lw=1.5)
    ax.axvline(sigma_star, color="crimson", ls="--", label=f"sigma*={sigma_star:.4g}")
    ax.axvline(1.0, color="gray", ls=":", label="training scale")
    ax.set_xscale("log")
    ax.set_xlabel("forecast scale sigma")
    ax.set_ylabel("shifted expected loss")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_dispersion(records, path, title: str = ""):
    """Original vs flipped divergence per unit, with the break-even diagonal."""
    fig, ax = plt.subplots(figsize=(5, 5))
    xs = np.array([r.d_original for r in records])
    ys = np.array([r.d_flipped for r in records])
    finite = np.isfinite(xs) & np.isfinite(ys)
    ax.scatter(xs[finite], ys[finite], s=18, alpha=0.8)
    if np.any(finite):
        top = float(max(xs[finite].max(), ys[finite].max())) * 1.05
        ax.plot([0, top], [0, top], color="gray", ls=":")
    ax.set_xlabel("divergence, original dispersion")
    ax.set_ylabel("divergence, flipped dispersion")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_verdicts(rows, path, title: str = ""):
    """Signed margins lhs-rhs for a sweep of asymmetry verdicts."""
    fig, ax = plt.subplots(figsize=(8, max(3, 0.22 * len(rows))))
    labels = [f"{r.loss}/{r.family}/{r.param:g}" for r in rows]
    margins = [
        r.verdict.lhs - r.verdict.rhs
        if np.isfinite(r.verdict.lhs - r.verdict.rhs)
        else 0.0
        for r in rows
    ]
    colors = ["tab:red" if m > 0 else "tab:blue" if m < 0 else "gray" for m in margins]
    ax.barh(np.arange(len(rows)), margins, color=colors)
    ax.set_yticks(np.arange(len(rows)))
    ax.set_yticklabels(labels, fontsize=6)
    ax.axvline(0.0, color="black", lw=0.8)
    ax.set_xlabel("loss(over) - loss(under)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
