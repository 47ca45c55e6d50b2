"""Exact Monte Carlo of the randomized-benchmarking experiment.

Builds the noisy sequence operator for every (sequence, noise
realization) pair, evaluates trace fidelities, and assembles the k x n
fidelity matrix with deterministic per-cell random streams.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import noise as noise_mod
from .clifford import IDENTITY_2, CliffordTable, SequenceSpec, build_table

#: Allowed excursion of a fidelity outside [0, 1] before we call it corruption.
FIDELITY_SLACK = 1e-12

UNITARITY_TOL = 1e-10


class NumericalIntegrityError(RuntimeError):
    """A computed quantity left its mathematically allowed range."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameter set of one simulated RB run."""

    J: int
    k: int
    n: int
    noise_model: object
    mode: str = "dephasing"  # or "universal"
    master_seed: int = 0

    def __post_init__(self):
        if min(self.J, self.k, self.n) < 1:
            raise ValueError("J, k, n must all be >= 1")
        if self.mode not in ("dephasing", "universal"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "universal" and not isinstance(
            self.noise_model, noise_mod.UniversalNoise
        ):
            raise ValueError("universal mode needs a UniversalNoise model")


@dataclass
class FidelityMatrix:
    """k x n per-(sequence, realization) fidelities plus provenance."""

    values: np.ndarray
    J: int
    config: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


def rotation_unitaries(angles: np.ndarray) -> np.ndarray:
    """Batched exp(-i vec(Delta) . vec(sigma)) from axis-angle components.

    `angles` has shape (..., 3); a scalar dephasing angle delta corresponds
    to (0, 0, delta).  Uses the closed 2x2 form, not a matrix exponential.
    """
    angles = np.asarray(angles, dtype=float)
    theta = np.linalg.norm(angles, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(theta[..., None] > 0.0, angles / theta[..., None], 0.0)
    c = np.cos(theta)
    s = np.sin(theta)
    sx, sy, sz = s * unit[..., 0], s * unit[..., 1], s * unit[..., 2]
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c - 1j * sz
    out[..., 0, 1] = -sy - 1j * sx
    out[..., 1, 0] = sy - 1j * sx
    out[..., 1, 1] = c + 1j * sz
    return out


def _as_axis_angles(values: np.ndarray, J: int) -> np.ndarray:
    """Promote a (..., J) dephasing series to (..., J, 3) axis angles."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] == 3 and values.ndim >= 2 and values.shape[-2] == J:
        return values
    if values.shape[-1] != J:
        raise ValueError(f"noise length {values.shape[-1]} != J={J}")
    out = np.zeros(values.shape + (3,))
    out[..., 2] = values
    return out


def noisy_sequence_unitary(seq: SequenceSpec, noise, table: CliffordTable) -> np.ndarray:
    """U_1 C_1 U_2 C_2 ... U_J C_J for one realization.

    `noise` is a length-J angle series (dephasing about Z) or a (J, 3)
    array of per-axis rotation angles.
    """
    angles = _as_axis_angles(noise, seq.J)
    if angles.ndim != 2:
        raise ValueError("one realization at a time; got a batch")
    unitaries = rotation_unitaries(angles)
    out = IDENTITY_2.copy()
    for j, index in enumerate(seq.indices):
        out = out @ unitaries[j] @ table.element(index).matrix
    deviation = np.max(np.abs(out.conj().T @ out - IDENTITY_2))
    if deviation > UNITARITY_TOL:
        raise NumericalIntegrityError(
            f"sequence product lost unitarity: deviation {deviation:.3e}"
        )
    return out


def trace_fidelity(noisy: np.ndarray) -> float:
    """|Tr(S)|^2 / 4, clamped into [0, 1] within a tiny slack."""
    f = abs(noisy[..., 0, 0] + noisy[..., 1, 1]) ** 2 / 4.0
    return float(_clamp_fidelity(np.asarray(f)))


def _clamp_fidelity(f: np.ndarray) -> np.ndarray:
    if np.any(f > 1.0 + FIDELITY_SLACK) or np.any(f < -FIDELITY_SLACK):
        worst = float(f.max()) if f.max() > 1.0 else float(f.min())
        raise NumericalIntegrityError(
            f"fidelity {worst!r} outside [0, 1] beyond slack {FIDELITY_SLACK}"
        )
    return np.clip(f, 0.0, 1.0)


def sequence_rng(master_seed: int, row: int) -> np.random.Generator:
    """Stream for sampling the row-th Clifford sequence."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(0, row)))


def noise_rng(master_seed: int, row: int, col: int) -> np.random.Generator:
    """Stream for the noise realization of matrix cell (row, col)."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(1, row, col))
    )


def _row_fidelities(cfg: ExperimentConfig, table: CliffordTable, row: int) -> np.ndarray:
    seq = table.sample_sequence(cfg.J, sequence_rng(cfg.master_seed, row))
    draws = [
        noise_mod.sample_realization(cfg.noise_model, cfg.J, noise_rng(cfg.master_seed, row, col))
        for col in range(cfg.n)
    ]
    angles = _as_axis_angles(np.stack(draws), cfg.J)
    unitaries = rotation_unitaries(angles)  # (n, J, 2, 2)
    product = np.broadcast_to(IDENTITY_2, (cfg.n, 2, 2)).copy()
    for j, index in enumerate(seq.indices):
        product = product @ (unitaries[:, j] @ table.element(index).matrix)
    deviation = np.max(np.abs(product.conj().transpose(0, 2, 1) @ product - IDENTITY_2))
    if deviation > UNITARITY_TOL:
        raise NumericalIntegrityError(
            f"row {row}: sequence product lost unitarity ({deviation:.3e})"
        )
    f = np.abs(product[:, 0, 0] + product[:, 1, 1]) ** 2 / 4.0
    return _clamp_fidelity(f)


def run_experiment(cfg: ExperimentConfig, table: CliffordTable | None = None,
                   threads: int = 1) -> FidelityMatrix:
    """Simulate the full k x n fidelity matrix.

    Deterministic given the master seed: cell (i, j) depends only on the
    streams derived from (master, i) and (master, i, j), so adding rows or
    columns never perturbs existing cells, and neither does `threads`.
    """
    if table is None:
        table = build_table()
    values = np.empty((cfg.k, cfg.n))
    if threads <= 1:
        for row in range(cfg.k):
            values[row] = _row_fidelities(cfg, table, row)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for row, fids in enumerate(
                pool.map(lambda r: _row_fidelities(cfg, table, r), range(cfg.k))
            ):
                values[row] = fids
    config = {
        "J": cfg.J, "k": cfg.k, "n": cfg.n, "mode": cfg.mode,
        "master_seed": cfg.master_seed,
        "noise_model": noise_mod.model_to_dict(cfg.noise_model),
    }
    return FidelityMatrix(values=values, J=cfg.J, config=config)


def row_average(matrix: FidelityMatrix) -> np.ndarray:
    """Noise-averaged fidelity per sequence (mean across columns)."""
    return np.array([math.fsum(row) / len(row) for row in matrix.values])


def grand_mean(matrix: FidelityMatrix) -> float:
    """Mean over all k*n entries: the sample estimator of the true mean."""
    return math.fsum(math.fsum(row) for row in matrix.values) / matrix.values.size


def write_fidelity_csv(path, matrix: FidelityMatrix, sidecar_path=None,
                       extra_meta: dict | None = None) -> None:
    """Matrix CSV (row = sequence, col = realization) plus a JSON sidecar."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"delta_{j}" for j in range(1, matrix.n + 1)])
        for row in matrix.values:
            writer.writerow([f"{v:.17g}" for v in row])
    if sidecar_path is not None:
        meta = dict(matrix.config)
        if extra_meta:
            meta.update(extra_meta)
        with open(sidecar_path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_fidelity_csv(path, sidecar_path=None) -> FidelityMatrix:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        values = np.array([[float(v) for v in row] for row in reader])
    if values.ndim != 2 or values.shape[1] != len(header):
        raise ValueError(f"{path}: ragged or empty fidelity table")
    config = {}
    if sidecar_path is not None:
        with open(sidecar_path) as fh:
            config = json.load(fh)
    return FidelityMatrix(values=values, J=int(config.get("J", 0)), config=config)
