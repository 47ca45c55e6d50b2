"""Matplotlib renderings of the CLI's CSV artifacts.

All figures are written straight to files; no interactive backends.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_histogram(path, samples, edges, overlay=None, xlabel="fidelity") -> None:
    """Density-normalized histogram, optionally with an analytic overlay.

    `overlay` is a callable density evaluated on a fine grid across the
    histogram support.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(np.asarray(samples, dtype=float), bins=np.asarray(edges),
            density=True, alpha=0.6, color="tab:blue", label="simulated")
    if overlay is not None:
        grid = np.linspace(edges[0], edges[-1], 512)
        ax.plot(grid, overlay(grid), "k-", lw=1.5, label="analytic")
        ax.legend()
    ax.set_xlabel(xlabel)
    ax.set_ylabel("probability density")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_density(path, grid, density, xlabel="fidelity") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.asarray(grid), np.asarray(density), "-", color="tab:red")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("probability density")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_autocorrelation(path, lags, analytic, empirical=None) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lags, analytic, "k-", label="analytic")
    if empirical is not None:
        ax.plot(lags, empirical, "o", ms=3, color="tab:blue", label="empirical")
    ax.set_xlabel("lag k (gates)")
    ax.set_ylabel("C(k) (rad$^2$)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_failure_curve(path, k_values, failures, epsilon, k_minimum) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(k_values, failures, "-", color="tab:blue")
    ax.axhline(epsilon, color="k", ls="--", lw=1, label=f"target {epsilon:g}")
    ax.axvline(k_minimum, color="tab:red", ls=":", lw=1,
               label=f"k_min = {k_minimum}")
    ax.set_xlabel("number of sequences k")
    ax.set_ylabel("failure probability")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
