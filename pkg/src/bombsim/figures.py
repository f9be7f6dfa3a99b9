"""Matplotlib figure rendering for the report path.

Figures land next to the delimited output as PNG files; every function
returns the written path.  Rendering is headless (Agg).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_loglog_fit(points, fit, path, xlabel="size", ylabel="cost",
                    title=None):
    """Scatter of (size, cost) with the fitted power law overlaid."""
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.loglog(xs, ys, "o", ms=4, alpha=0.7, label="measured")
    if fit is not None:
        grid = np.geomspace(xs.min(), xs.max(), 64)
        ax.loglog(grid, fit.constant * grid ** fit.exponent, "-",
                  label=f"fit: {fit.constant:.3g} * x^{fit.exponent:.3f}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_series(x, series: dict, path, xlabel="", ylabel="", title=None,
                logx=False, logy=False):
    """One or more named line series over a common x axis."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for name, ys in series.items():
        ax.plot(x, ys, "o-", ms=4, label=name)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_histogram(values, path, xlabel="", title=None, bins=30):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.hist(values, bins=bins, alpha=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
