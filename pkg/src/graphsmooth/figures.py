"""Matplotlib rendering of the report figures, alongside the CSV/JSON data.

All renderers write PNG files with the Agg backend and stripped metadata,
so repeated runs with the same inputs produce byte-identical images.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spectral import GeometryFit

_SAVE_KWARGS = {"dpi": 150, "metadata": {"Software": None}}


def render_geometry_figure(points: np.ndarray, fit: GeometryFit, path: str | Path) -> None:
    """Scatter of log lambda_i against log(i/n) with the fitted line."""
    x, y = points[:, 1], points[:, 2]
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    ax.plot(x, y, ".", ms=4, color="tab:blue", label="eigenvalues")
    i_lo, i_hi = fit.window
    xw = points[(points[:, 0] >= i_lo) & (points[:, 0] <= i_hi), 1]
    ax.plot(xw, fit.intercept + fit.slope * xw, "--", color="tab:red",
            label=f"slope {fit.slope:.2f} (r = {fit.r_hat:.2f})")
    ax.set_xlabel("log(i/n)")
    ax.set_ylabel("log eigenvalue")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def render_rate_figure(result, path: str | Path) -> None:
    """Median estimation error against n on log-log axes, with both slopes."""
    ns = np.asarray(result.realized_sizes, dtype=np.float64)
    med = np.asarray(result.median_errors)
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    for i in range(result.errors.shape[0]):
        ax.plot([ns[i]] * result.errors.shape[1], result.errors[i], ".",
                ms=3, color="0.7")
    ax.plot(ns, med, "o-", color="tab:blue",
            label=f"median error (fitted exponent {result.fitted_exponent:.3f})")
    anchor = med[0] * (ns / ns[0]) ** (-result.theoretical_exponent)
    ax.plot(ns, anchor, "--", color="tab:red",
            label=f"theoretical exponent {result.theoretical_exponent:.3f}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("estimation error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def render_posterior_figure(summary, path: str | Path, observations=None) -> None:
    """Posterior mean with a two-standard-deviation band over vertex index."""
    mean = summary.mean
    sd = np.sqrt(summary.pointwise_var)
    v = np.arange(1, mean.shape[0] + 1)
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    if observations is not None:
        ax.plot(v, observations, ".", ms=3, color="0.6", label="data")
    ax.fill_between(v, mean - 2 * sd, mean + 2 * sd, color="tab:blue", alpha=0.25,
                    label="mean +/- 2 sd")
    ax.plot(v, mean, "-", color="tab:blue", lw=1.2, label="posterior mean")
    ax.set_xlabel("vertex")
    ax.set_ylabel("value")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
