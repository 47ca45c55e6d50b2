"""Closed-form fidelity distributions, moments, and confidence machinery.

The noise-averaged fidelity in every correlation regime follows a shifted,
reflected gamma law: nu = Delta - F is gamma distributed with shape alpha
and scale beta.  This module builds those laws from the regime parameters,
maps generic autocorrelation functions onto them, evaluates the exact
finite-averaging DC density, and solves for the minimum number of random
sequences needed to certify a confidence band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import (
    log_bessel_k,
    log_gamma,
    regularized_gamma_p,
    regularized_gamma_q,
)

#: Relative slack accepted when comparing a failure probability against the
#: target epsilon in k_min searches.  The DC boundary case sits on the target
#: to within ~1e-5 relative, so a strict comparison is numerically brittle.
KMIN_BOUNDARY_RTOL = 1e-4


@dataclass(frozen=True)
class GammaLaw:
    """Fidelity law: nu = delta_offset - F is Gamma(shape, scale)."""

    shape: float
    scale: float
    delta_offset: float = 1.0

    def __post_init__(self):
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError("shape and scale must be positive")

    def pdf(self, F):
        """Density of the fidelity variable; support F <= delta_offset."""
        F = np.asarray(F, dtype=float)
        nu = self.delta_offset - F
        out = np.zeros_like(nu)
        ok = nu > 0
        out[ok] = gamma_pdf(nu[ok], self.shape, self.scale)
        return out if out.ndim else float(out)

    def cdf(self, F):
        """P(fidelity <= F) = Q(shape, nu / scale)."""
        F = np.atleast_1d(np.asarray(F, dtype=float))
        out = np.ones_like(F)
        for i, f in enumerate(F):
            nu = self.delta_offset - f
            if nu > 0:
                out[i] = regularized_gamma_q(self.shape, nu / self.scale)
        return out if out.size > 1 else float(out[0])


@dataclass(frozen=True)
class RegimeMoments:
    """Expectation, mode, variance, and skew of the fidelity law."""

    expectation: float
    mode: float
    variance: float
    skew: float


def gamma_pdf(x, shape: float, scale: float):
    """Gamma density x^(a-1) exp(-x/b) / (Gamma(a) b^a), in log space."""
    if shape <= 0 or scale <= 0:
        raise ValueError("shape and scale must be positive")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("gamma density is supported on x >= 0")
    norm = log_gamma(shape) + shape * math.log(scale)
    out = np.zeros_like(x)
    pos = x > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp((shape - 1.0) * np.log(x[pos]) - x[pos] / scale - norm)
    zero = ~pos
    if np.any(zero):
        if shape == 1.0:
            out[zero] = 1.0 / scale
        elif shape < 1.0:
            out[zero] = np.inf
    return out if out.ndim else float(out)


def fidelity_law(regime: str, J: int, sigma: float, n: int | None = None,
                 M: int | None = None, large_M: bool = False) -> GammaLaw:
    """Gamma law of the noise-averaged fidelity for a closed-form regime.

    Regimes: "markovian" (needs the averaging count n), "dc", and "block"
    (needs the block length M, 2 <= M <= J).  `large_M` switches the block
    law to its large-block variant, which uses M in place of M - 1.
    """
    if J < 1 or sigma <= 0:
        raise ValueError("need J >= 1 and sigma > 0")
    if regime == "markovian":
        if n is None or n < 1:
            raise ValueError("markovian law needs n >= 1")
        return GammaLaw(
            shape=1.5 * n,
            scale=(2.0 / 3.0) * J * sigma**2 / n,
            delta_offset=1.0 + (2.0 / 3.0) * J**2 * sigma**4,
        )
    if regime == "dc":
        return GammaLaw(shape=1.5, scale=(2.0 / 3.0) * J * sigma**2)
    if regime == "block":
        if M is None or M > J:
            raise ValueError("block law needs M with 2 <= M <= J")
        if M < 2:
            raise ValueError(
                "block M=1 has a degenerate (zero-variance) law; use the "
                "markovian regime, which carries the n dependence"
            )
        m_eff = M if large_M else M - 1
        return GammaLaw(shape=1.5 * J / m_eff,
                        scale=(2.0 / 3.0) * m_eff * sigma**2)
    raise ValueError(f"unknown regime {regime!r}")


def regime_moments(law: GammaLaw) -> RegimeMoments:
    """Moments of the fidelity variable from the gamma-law parameters."""
    a, b, d = law.shape, law.scale, law.delta_offset
    return RegimeMoments(
        expectation=d - a * b,
        mode=d - (a - 1.0) * b,
        variance=a * b**2,
        skew=-2.0 / math.sqrt(a),
    )


def generic_gamma_params(C, J: int) -> GammaLaw:
    """Law of the infidelity for an arbitrary stationary autocorrelation.

    `C` is the sequence C(k) for k = 0..J-1 (at least; extra entries are
    ignored).  The infidelity mean is J C(0) and its variance
    (4/3) sum_{k=1}^{J-1} (J-k) C(k)^2; the law is their matching gamma.
    """
    C = np.asarray(C, dtype=float)
    if C.shape[0] < J:
        raise ValueError(f"need C(k) for k = 0..{J - 1}")
    if C[0] <= 0:
        raise ValueError("C(0) must be positive")
    k = np.arange(1, J)
    E = J * C[0]
    V = (4.0 / 3.0) * float(np.sum((J - k) * C[1:J] ** 2))
    if V <= 0:
        raise ValueError(
            "zero variance: the noise is uncorrelated between gates; use "
            "fidelity_law('markovian', ...), which carries the n dependence"
        )
    return GammaLaw(shape=E**2 / V, scale=V / E, delta_offset=1.0)


def psd_to_autocorrelation(modes, gate_time: float, J: int) -> np.ndarray:
    """C(k), k = 0..J-1, for a Dirac-comb power spectral density.

    `modes` is an iterable of (omega, weight) pairs describing
    S(omega) = sum_m w_m delta(omega - omega_m) over the full frequency
    axis; the correlation integral then sifts to a plain cosine sum.
    """
    if gate_time <= 0:
        raise ValueError("gate_time must be positive")
    modes = list(modes)
    if any(w < 0 for _, w in modes):
        raise ValueError("comb weights must be nonnegative")
    k = np.arange(J)
    out = np.zeros(J)
    for omega, weight in modes:
        out += weight * np.cos(omega * k * gate_time)
    return out


def dc_finite_n_pdf(F, J: int, sigma: float, n: int):
    """Exact density of the n-realization DC noise-averaged fidelity.

    The infidelity is a product of two independent gamma variables (the
    averaged squared noise amplitude and the squared lattice-walk length),
    giving a modified-Bessel-K density with rate kappa = 3n / (J sigma^2).
    Converges to the 3/2-shape gamma law as n grows.
    """
    if n < 1 or J < 1 or sigma <= 0:
        raise ValueError("need n >= 1, J >= 1, sigma > 0")
    F = np.asarray(F, dtype=float)
    nu = 1.0 - F
    kappa = 3.0 * n / (J * sigma**2)
    a = 0.5 * (n + 3.0)  # combined power (n/2 + 3/2) / 2 appears halved below
    log_norm = (math.log(2.0) + 0.5 * a * math.log(kappa / 4.0)
                - log_gamma(n / 2.0) - log_gamma(1.5))
    out = np.zeros_like(nu)
    pos = nu > 0
    for i in np.flatnonzero(pos):
        v = nu.flat[i]
        out.flat[i] = math.exp(
            log_norm + (0.5 * a - 1.0) * math.log(v)
            + log_bessel_k(0.5 * (n - 3.0), math.sqrt(kappa * v))
        )
    return out if out.ndim else float(out)


def confidence_failure(shape: float, scale: float, G_L: float, G_U: float,
                       k: int) -> float:
    """Probability the k-sequence mean infidelity leaves the +-G band.

    The band is relative: the sample mean of k i.i.d. Gamma(shape, scale)
    infidelities must fall within (1 - G_U, 1 + G_L) times its expectation.
    Only shape, the band, and k enter; scale cancels and is accepted for
    interface symmetry.
    """
    del scale
    if not (0.0 < G_U < 1.0) or G_L <= 0.0:
        raise ValueError("need G_L > 0 and 0 < G_U < 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    a = k * shape
    return (regularized_gamma_q(a, a * (1.0 + G_L))
            + regularized_gamma_p(a, a * (1.0 - G_U)))


def k_min(shape: float, G_L: float, G_U: float, epsilon: float,
          boundary_rtol: float = KMIN_BOUNDARY_RTOL) -> int:
    """Smallest k whose failure probability clears epsilon.

    Accepts k when the failure probability is below epsilon within the
    relative slack `boundary_rtol` (pass 0 for a strict comparison); the
    tail is monotone, so an exponential bracket plus bisection suffices.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must be in (0, 1)")
    threshold = epsilon * (1.0 + boundary_rtol)

    def ok(k):
        return confidence_failure(shape, 1.0, G_L, G_U, k) < threshold

    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > 10**9:
            raise RuntimeError("k_min search exceeded 1e9 sequences")
    lo = hi // 2  # ok(lo) is False (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def failure_probability_table(shape: float, G_L: float, G_U: float,
                              k_values) -> list:
    """(k, delta_fail) pairs, e.g. for tabulating a k_min search."""
    return [(int(k), confidence_failure(shape, 1.0, G_L, G_U, int(k)))
            for k in k_values]


def sample_moments(values) -> RegimeMoments:
    """Mean, histogram-free mode stand-in, variance, and skew of a sample.

    The mode slot holds the gamma-law mode implied by the sample mean and
    variance under a Delta = 1 offset; for model comparison only.
    """
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    var = float(np.var(values, ddof=1))
    centered = values - mean
    skew = float(np.mean(centered**3) / np.mean(centered**2) ** 1.5)
    nu_mean = 1.0 - mean
    alpha = nu_mean**2 / var if var > 0 else math.inf
    beta = var / nu_mean if nu_mean != 0 else 0.0
    mode = 1.0 - (alpha - 1.0) * beta if math.isfinite(alpha) else mean
    return RegimeMoments(expectation=mean, mode=mode, variance=var, skew=skew)
