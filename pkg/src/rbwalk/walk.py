"""Pauli-space random-walk reduction of sequence infidelity.

Twirling the error axis through the cumulative Clifford prefixes turns
each noisy gate into a signed Cartesian step; the sequence infidelity is,
to leading order, the squared length of the resulting walk.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .clifford import CliffordTable, SequenceSpec

REGIMES = ("markovian", "dc", "generic")


@dataclass(frozen=True)
class WalkVector:
    """Endpoint of the twirled error walk, in radians per component."""

    R: np.ndarray

    @property
    def squared_norm(self) -> float:
        return float(self.R @ self.R)


def walk_vector(seq: SequenceSpec, noise, table: CliffordTable,
                axis: str = "Z") -> WalkVector:
    """R = sum_j delta_j r_hat_j with exact integer step directions."""
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (seq.J,):
        raise ValueError(f"noise length {noise.shape} does not match J={seq.J}")
    directions = table.twirl_directions(seq, axis=axis)
    return WalkVector(R=noise @ directions)


def walk_path(seq: SequenceSpec, noise, table: CliffordTable,
              axis: str = "Z") -> np.ndarray:
    """(J, 3) cumulative walk positions after each step."""
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (seq.J,):
        raise ValueError(f"noise length {noise.shape} does not match J={seq.J}")
    directions = table.twirl_directions(seq, axis=axis)
    return np.cumsum(noise[:, None] * directions, axis=0)


def lattice_vector(seq: SequenceSpec, table: CliffordTable,
                   axis: str = "Z") -> np.ndarray:
    """Integer endpoint V of the unit-step walk (the sigma -> 0 shape)."""
    return table.twirl_directions(seq, axis=axis).sum(axis=0)


def sample_lattice_endpoints(J: int, count: int, rng: np.random.Generator,
                             table: CliffordTable, axis: str = "Z") -> np.ndarray:
    """(count, 3) integer endpoints of independent J-step twirl walks.

    Equivalent in distribution to `lattice_vector` over sampled sequences
    but vectorized over the batch: prefixes are composed through the
    integer composition table and only the image of `axis` is accumulated.
    The closing element of each sequence never enters the directions, so
    it is not drawn; the stream therefore differs from per-sequence
    `sample_sequence` calls.
    """
    if J < 2:
        raise ValueError("J must be >= 2")
    comp = np.asarray(table.composition_table)  # 1-based values
    axis_idx = ("X", "Y", "Z").index(axis.upper())
    images = np.stack([e.rotation[:, axis_idx] for e in table.elements])
    head = rng.integers(1, 25, size=(count, J - 1))
    prefix = np.ones(count, dtype=np.int64)  # identity element index
    V = np.zeros((count, 3), dtype=np.int64)
    for m in range(J):
        V += images[prefix - 1]
        if m < J - 1:
            prefix = comp[prefix - 1, head[:, m] - 1]
    return V


def universal_walk_vectors(seq: SequenceSpec, noise, table: CliffordTable):
    """Per-axis walks for (J, 3) multi-axis noise.

    Returns a dict axis label -> WalkVector; the leading-order infidelity
    is the sum of the three squared norms.
    """
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (seq.J, 3):
        raise ValueError(f"need (J, 3) noise, got {noise.shape}")
    return {
        axis: walk_vector(seq, noise[:, i], table, axis=axis)
        for i, axis in enumerate(("X", "Y", "Z"))
    }


def markovian_fourth_order_correction(J: int, sigma: float) -> float:
    """Ensemble-average fourth-order offset (2/3) J^2 sigma^4 for i.i.d. noise."""
    return (2.0 / 3.0) * J**2 * sigma**4


def fidelity_approx(seq: SequenceSpec, noise_batch, table: CliffordTable,
                    regime: str, sigma: float | None = None) -> float:
    """Leading-order noise-averaged fidelity 1 - mean ||R||^2 + correction.

    The correction is the constant fourth-order offset in the Markovian
    regime (which then needs `sigma`) and zero for dc/generic, where the
    higher-order terms are dropped.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    batch = np.atleast_2d(np.asarray(noise_batch, dtype=float))
    if batch.shape[1] != seq.J:
        raise ValueError(f"realization length {batch.shape[1]} != J={seq.J}")
    directions = table.twirl_directions(seq)
    endpoints = batch @ directions
    mean_sq = float(np.mean(np.sum(endpoints**2, axis=1)))
    correction = 0.0
    if regime == "markovian":
        if sigma is None:
            raise ValueError("markovian correction needs sigma")
        correction = markovian_fourth_order_correction(seq.J, sigma)
    return 1.0 - mean_sq + correction


def lattice_walk_distance_pdf(J: int):
    """Continuum density f_R(r) = (3/2piJ)^{3/2} 4pi r^2 exp(-3r^2/2J).

    A good approximation to the endpoint distance of a J-step unit walk on
    the cubic lattice once J is a few tens; the mode sits at sqrt(2J/3).
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    prefactor = (3.0 / (2.0 * np.pi * J)) ** 1.5 * 4.0 * np.pi

    def pdf(r):
        r = np.asarray(r, dtype=float)
        return prefactor * r**2 * np.exp(-3.0 * r**2 / (2.0 * J))

    return pdf


def write_walk_path_csv(path, positions) -> None:
    """Cumulative path as CSV with columns j, x, y, z."""
    positions = np.asarray(positions, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "x", "y", "z"])
        for j, row in enumerate(positions, start=1):
            writer.writerow([j] + [f"{v:.17g}" for v in row])
