"""Correlated rotation-angle noise generators.

Four correlation structures are supported: per-gate independent
(Markovian), frozen-per-sequence (DC), block-constant, and generic
spectra synthesized as a phase-randomized cosine comb.  Each model knows
its analytic autocorrelation function; an empirical estimator is provided
for cross-checks.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class Markovian:
    """i.i.d. N(0, sigma^2) angle per gate (correlation length 1).

    sigma = 0 is the degenerate noiseless model.
    """

    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class DC:
    """One N(0, sigma^2) draw frozen over the whole sequence."""

    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class Block:
    """Constant within length-M blocks, independent across blocks.

    When M does not divide J the final block is truncated.
    """

    sigma: float
    block_length: int

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.block_length < 1:
            raise ValueError("block_length must be >= 1")


@dataclass(frozen=True)
class FourierPSD:
    """Phase-randomized cosine comb with mode weights q * F(q).

    delta_j = x(j * gate_time) where
    x(t) = amplitude * mode_spacing * sum_q q F(q) cos(q mode_spacing t + psi_q)
    with psi_q i.i.d. uniform on [0, 2pi), redrawn per realization.
    """

    weights: tuple  # F(q) for q = 1..Q
    mode_spacing: float  # omega_0, rad/s
    amplitude: float  # dimensionless global scale
    gate_time: float  # tau_g, seconds

    def __post_init__(self):
        if len(self.weights) < 1:
            raise ValueError("need at least one mode")
        if self.mode_spacing <= 0 or self.gate_time <= 0:
            raise ValueError("mode_spacing and gate_time must be positive")

    @property
    def mode_count(self) -> int:
        return len(self.weights)

    @property
    def mode_amplitudes(self) -> np.ndarray:
        """q * F(q) for q = 1..Q."""
        q = np.arange(1, self.mode_count + 1)
        return q * np.asarray(self.weights, dtype=float)

    def variance(self) -> float:
        """C(0) = (amplitude * omega_0)^2 / 2 * sum (q F(q))^2."""
        a = self.amplitude * self.mode_spacing
        return 0.5 * a**2 * float(np.sum(self.mode_amplitudes**2))

    @classmethod
    def power_law(cls, p, mode_count, mode_spacing, amplitude, gate_time):
        """Comb with F(q) = q^(p/2 - 1): p = 0 white, -1 pink, 1 Ohmic."""
        w = tuple(power_law_weights(p)(q) for q in range(1, mode_count + 1))
        return cls(weights=w, mode_spacing=mode_spacing, amplitude=amplitude,
                   gate_time=gate_time)


@dataclass(frozen=True)
class UniversalNoise:
    """Independent per-axis angle processes for multi-axis rotation errors.

    Each of x/y/z is a scalar noise model or None for a quiet axis.  Axes
    are sampled in x, y, z order from the same stream, so a z-only model
    consumes the stream exactly like the bare scalar model does.
    """

    x: object = None
    y: object = None
    z: object = None

    def __post_init__(self):
        if self.x is None and self.y is None and self.z is None:
            raise ValueError("at least one axis needs a noise model")

    @property
    def axis_models(self):
        return (self.x, self.y, self.z)

    @classmethod
    def z_only(cls, model):
        return cls(z=model)

    @classmethod
    def isotropic(cls, sigma, model_cls=Markovian, **kwargs):
        """Three i.i.d. axis processes with per-axis variance sigma^2 / 3."""
        per_axis = model_cls(sigma / np.sqrt(3.0), **kwargs)
        return cls(x=per_axis, y=per_axis, z=per_axis)


def power_law_weights(p: float):
    """Mode-weight function F(q) = q^(p/2 - 1) for a PSD scaling as omega^p."""
    return lambda q: float(q) ** (p / 2.0 - 1.0)


def calibrate_amplitude(model: FourierPSD, target_variance: float) -> FourierPSD:
    """Rescale `amplitude` so the per-gate variance C(0) hits the target."""
    if target_variance <= 0:
        raise ValueError("target_variance must be positive")
    scale = np.sqrt(target_variance / model.variance())
    return FourierPSD(weights=model.weights, mode_spacing=model.mode_spacing,
                      amplitude=model.amplitude * scale, gate_time=model.gate_time)


def sample_realization(model, J: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one length-J rotation-angle series from the model."""
    if J < 1:
        raise ValueError(f"J must be >= 1, got {J}")
    if isinstance(model, Markovian):
        return rng.normal(0.0, model.sigma, size=J)
    if isinstance(model, DC):
        return np.full(J, rng.normal(0.0, model.sigma))
    if isinstance(model, Block):
        M = model.block_length
        n_blocks = -(-J // M)
        draws = rng.normal(0.0, model.sigma, size=n_blocks)
        return np.repeat(draws, M)[:J]
    if isinstance(model, FourierPSD):
        psi = rng.uniform(0.0, 2.0 * np.pi, size=model.mode_count)
        cos_basis, sin_basis = _fourier_basis(model, J)
        # cos(w t + psi) expanded so the per-draw cost is two mat-vecs.
        return cos_basis @ np.cos(psi) - sin_basis @ np.sin(psi)
    if isinstance(model, UniversalNoise):
        out = np.zeros((J, 3))
        for axis, axis_model in enumerate(model.axis_models):
            if axis_model is not None:
                out[:, axis] = sample_realization(axis_model, J, rng)
        return out
    raise TypeError(f"unknown noise model: {model!r}")


@lru_cache(maxsize=32)
def _fourier_basis(model: FourierPSD, J: int):
    """Precomputed (J, Q) cosine/sine mode tables scaled by the weights."""
    t = np.arange(1, J + 1) * model.gate_time
    omega = np.arange(1, model.mode_count + 1) * model.mode_spacing
    scaled = model.amplitude * model.mode_spacing * model.mode_amplitudes
    phases = np.outer(t, omega)
    cos_basis = np.cos(phases) * scaled
    sin_basis = np.sin(phases) * scaled
    cos_basis.setflags(write=False)
    sin_basis.setflags(write=False)
    return cos_basis, sin_basis


def analytic_autocorrelation(model, J: int) -> np.ndarray:
    """C(k) for k = 0..J-1, in radians^2.

    The block value is the expected overlap fraction for a randomly phased
    block grid, sigma^2 * max(0, 1 - k/M); it is a cross-check quantity
    only, not the source of the block-regime distribution parameters.
    """
    k = np.arange(J)
    if isinstance(model, Markovian):
        c = np.zeros(J)
        c[0] = model.sigma**2
        return c
    if isinstance(model, DC):
        return np.full(J, model.sigma**2)
    if isinstance(model, Block):
        return model.sigma**2 * np.maximum(0.0, 1.0 - k / model.block_length)
    if isinstance(model, FourierPSD):
        a = model.amplitude * model.mode_spacing
        q = np.arange(1, model.mode_count + 1)
        tau = np.outer(k, q * model.mode_spacing * model.gate_time)
        return 0.5 * a**2 * (np.cos(tau) @ model.mode_amplitudes**2)
    raise TypeError(f"unknown noise model: {model!r}")


def empirical_autocorrelation(realizations) -> np.ndarray:
    """Lag-k product estimator averaged over realizations and time origins.

    No mean subtraction: for zero-mean processes this is unbiased, while a
    single constant realization c gives c^2 at every lag.
    """
    realizations = np.asarray(realizations, dtype=float)
    if realizations.ndim != 2:
        raise ValueError("need a 2D array (realizations x time)")
    n, J = realizations.shape
    if n < 2:
        raise ValueError("need at least 2 realizations")
    out = np.empty(J)
    for k in range(J):
        out[k] = np.mean(realizations[:, : J - k] * realizations[:, k:])
    return out


def write_realizations_csv(path, realizations) -> None:
    """One realization per row, header row j=1..J."""
    realizations = np.asarray(realizations, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"j={j}" for j in range(1, realizations.shape[1] + 1)])
        for row in realizations:
            writer.writerow([f"{v:.17g}" for v in row])


def read_realizations_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or not header[0].startswith("j="):
            raise ValueError(f"{path}: missing j=1..J header row")
        rows = [[float(v) for v in row] for row in reader]
    out = np.asarray(rows, dtype=float)
    if out.ndim != 2 or out.shape[1] != len(header):
        raise ValueError(f"{path}: ragged or empty realization table")
    return out


def model_to_dict(model) -> dict:
    """JSON-serializable descriptor, invertible via model_from_dict."""
    if isinstance(model, Markovian):
        return {"kind": "markovian", "sigma": model.sigma}
    if isinstance(model, DC):
        return {"kind": "dc", "sigma": model.sigma}
    if isinstance(model, Block):
        return {"kind": "block", "sigma": model.sigma,
                "block_length": model.block_length}
    if isinstance(model, FourierPSD):
        return {"kind": "fourier", "weights": list(model.weights),
                "mode_spacing": model.mode_spacing,
                "amplitude": model.amplitude, "gate_time": model.gate_time}
    if isinstance(model, UniversalNoise):
        return {"kind": "universal",
                "axes": [None if m is None else model_to_dict(m)
                         for m in model.axis_models]}
    raise TypeError(f"unknown noise model: {model!r}")


def model_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "markovian":
        return Markovian(sigma=d["sigma"])
    if kind == "dc":
        return DC(sigma=d["sigma"])
    if kind == "block":
        return Block(sigma=d["sigma"], block_length=int(d["block_length"]))
    if kind == "fourier":
        return FourierPSD(weights=tuple(d["weights"]),
                          mode_spacing=d["mode_spacing"],
                          amplitude=d["amplitude"], gate_time=d["gate_time"])
    if kind == "universal":
        axes = [None if m is None else model_from_dict(m) for m in d["axes"]]
        return UniversalNoise(x=axes[0], y=axes[1], z=axes[2])
    raise ValueError(f"unknown noise model kind: {kind!r}")
