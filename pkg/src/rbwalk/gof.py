"""Goodness-of-fit statistics for comparing samples against closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import chi_square_sf, kolmogorov_sf


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float
    sample_size: int


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    p_value: float
    dof: int


def ks_test(samples, cdf) -> KSResult:
    """One-sample Kolmogorov-Smirnov test against a callable CDF.

    The p-value uses the asymptotic Kolmogorov distribution with the
    Stephens small-sample correction; fine for N in the thousands.
    """
    samples = np.sort(np.asarray(samples, dtype=float))
    N = samples.size
    if N < 2:
        raise ValueError("need at least 2 samples")
    F = np.asarray(cdf(samples), dtype=float)
    grid = np.arange(1, N + 1) / N
    d_plus = np.max(grid - F)
    d_minus = np.max(F - (grid - 1.0 / N))
    D = max(d_plus, d_minus)
    lam = (math.sqrt(N) + 0.12 + 0.11 / math.sqrt(N)) * D
    return KSResult(statistic=float(D), p_value=kolmogorov_sf(lam), sample_size=N)


def chi_square_counts(observed, expected, fitted_params: int = 0) -> ChiSquareResult:
    """Pearson chi-square on pre-binned counts.

    Bins with expected count below 5 are pooled into their left neighbor
    before the statistic is formed.
    """
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if observed.shape != expected.shape:
        raise ValueError("count arrays must have equal shapes")
    obs_pooled, exp_pooled = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= 5.0:
            obs_pooled.append(acc_o)
            exp_pooled.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and obs_pooled:
        obs_pooled[-1] += acc_o
        exp_pooled[-1] += acc_e
    obs_pooled = np.asarray(obs_pooled)
    exp_pooled = np.asarray(exp_pooled)
    if obs_pooled.size < 2 + fitted_params:
        raise ValueError("too few usable bins for a chi-square test")
    stat = float(np.sum((obs_pooled - exp_pooled) ** 2 / exp_pooled))
    dof = obs_pooled.size - 1 - fitted_params
    return ChiSquareResult(statistic=stat, p_value=chi_square_sf(stat, dof), dof=dof)


def chi_square_density(samples, pdf, bins) -> ChiSquareResult:
    """Histogram a sample and test it against a density on given bin edges.

    Expected counts come from Simpson's rule on each bin, which is exact
    enough for the smooth densities used here.
    """
    samples = np.asarray(samples, dtype=float)
    edges = np.asarray(bins, dtype=float)
    observed, _ = np.histogram(samples, bins=edges)
    left, right = edges[:-1], edges[1:]
    mid = 0.5 * (left + right)
    probs = (right - left) / 6.0 * (pdf(left) + 4.0 * pdf(mid) + pdf(right))
    expected = samples.size * probs
    return chi_square_counts(observed, expected)


def freedman_diaconis_edges(samples, max_bins: int = 200) -> np.ndarray:
    """Histogram bin edges from the Freedman-Diaconis rule."""
    samples = np.asarray(samples, dtype=float)
    q25, q75 = np.percentile(samples, [25, 75])
    iqr = q75 - q25
    span = samples.max() - samples.min()
    if iqr <= 0 or span <= 0:
        return np.linspace(samples.min() - 0.5, samples.max() + 0.5, 3)
    width = 2.0 * iqr / samples.size ** (1.0 / 3.0)
    count = min(max_bins, max(1, int(math.ceil(span / width))))
    return np.linspace(samples.min(), samples.max(), count + 1)


def uniformity_chi_square(counts) -> ChiSquareResult:
    """Chi-square test of category counts against the uniform hypothesis."""
    counts = np.asarray(counts, dtype=float)
    expected = np.full_like(counts, counts.sum() / counts.size)
    return chi_square_counts(counts, expected)
