"""Monte Carlo engine: exactness, determinism, and I/O round-trips."""

import numpy as np
import pytest

from rbwalk.clifford import SequenceSpec
from rbwalk.noise import DC, Markovian, UniversalNoise
from rbwalk.simulator import (
    ExperimentConfig,
    FidelityMatrix,
    NumericalIntegrityError,
    _clamp_fidelity,
    grand_mean,
    noise_rng,
    noisy_sequence_unitary,
    read_fidelity_csv,
    rotation_unitaries,
    row_average,
    run_experiment,
    sequence_rng,
    trace_fidelity,
    write_fidelity_csv,
)

IDENTITY = np.eye(2, dtype=complex)


def test_rotation_unitaries_closed_form():
    u = rotation_unitaries(np.array([0.0, 0.0, 0.1]))
    expected = np.array([[np.exp(-0.1j), 0.0], [0.0, np.exp(0.1j)]])
    assert np.max(np.abs(u - expected)) < 1e-15
    u = rotation_unitaries(np.array([np.pi / 2, 0.0, 0.0]))
    expected = np.array([[0.0, -1j], [-1j, 0.0]])
    assert np.max(np.abs(u - expected)) < 1e-15


def test_rotation_unitaries_batched_and_unitary():
    rng = np.random.default_rng(0)
    angles = rng.normal(0.0, 0.4, size=(6, 5, 3))
    u = rotation_unitaries(angles)
    assert u.shape == (6, 5, 2, 2)
    gram = u.conj().swapaxes(-1, -2) @ u
    assert np.max(np.abs(gram - IDENTITY)) < 1e-14
    assert np.max(np.abs(rotation_unitaries(np.zeros(3)) - IDENTITY)) == 0.0


def test_zero_noise_sequence_is_identity(table):
    rng = np.random.default_rng(1)
    seq = table.sample_sequence(20, rng)
    s = noisy_sequence_unitary(seq, np.zeros(20), table)
    assert trace_fidelity(s) == pytest.approx(1.0, abs=1e-12)


def test_single_dephasing_angle_fidelity(table):
    # J=2 identity pair: S = U(delta) leads to F = cos^2(delta).
    seq = SequenceSpec(indices=(1, 1))
    s = noisy_sequence_unitary(seq, np.array([0.1, 0.0]), table)
    assert trace_fidelity(s) == pytest.approx(np.cos(0.1) ** 2, rel=1e-12)


def test_clamp_rejects_corrupt_values():
    assert np.all(_clamp_fidelity(np.array([0.0, 1.0 + 1e-13])) <= 1.0)
    with pytest.raises(NumericalIntegrityError):
        _clamp_fidelity(np.array([1.01]))
    with pytest.raises(NumericalIntegrityError):
        _clamp_fidelity(np.array([-0.01]))


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(J=0, k=1, n=1, noise_model=DC(0.1))
    with pytest.raises(ValueError):
        ExperimentConfig(J=2, k=1, n=1, noise_model=DC(0.1), mode="other")
    with pytest.raises(ValueError):
        ExperimentConfig(J=2, k=1, n=1, noise_model=DC(0.1), mode="universal")


def test_stream_derivation_is_stable():
    a = sequence_rng(7, 3).integers(0, 1 << 30, 4)
    b = sequence_rng(7, 3).integers(0, 1 << 30, 4)
    c = sequence_rng(7, 4).integers(0, 1 << 30, 4)
    d = noise_rng(7, 3, 0).integers(0, 1 << 30, 4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_run_experiment_thread_invariance(table):
    cfg = ExperimentConfig(J=20, k=6, n=5, noise_model=Markovian(0.05),
                           master_seed=11)
    serial = run_experiment(cfg, table=table, threads=1)
    threaded = run_experiment(cfg, table=table, threads=4)
    assert np.array_equal(serial.values, threaded.values)
    assert serial.config == threaded.config


def test_run_experiment_cells_stable_under_growth(table):
    # Enlarging the matrix never perturbs the already-computed cells.
    small = run_experiment(
        ExperimentConfig(J=15, k=3, n=4, noise_model=DC(0.05), master_seed=5),
        table=table)
    large = run_experiment(
        ExperimentConfig(J=15, k=5, n=7, noise_model=DC(0.05), master_seed=5),
        table=table)
    assert np.array_equal(large.values[:3, :4], small.values)


def test_run_experiment_seed_sensitivity(table):
    cfg_a = ExperimentConfig(J=15, k=3, n=4, noise_model=DC(0.05),
                             master_seed=0)
    cfg_b = ExperimentConfig(J=15, k=3, n=4, noise_model=DC(0.05),
                             master_seed=1)
    a = run_experiment(cfg_a, table=table)
    b = run_experiment(cfg_b, table=table)
    assert not np.array_equal(a.values, b.values)


def test_fidelities_in_range(table):
    cfg = ExperimentConfig(J=50, k=10, n=10, noise_model=Markovian(0.3),
                           master_seed=2)
    matrix = run_experiment(cfg, table=table)
    assert matrix.values.shape == (10, 10)
    assert np.all(matrix.values >= 0.0)
    assert np.all(matrix.values <= 1.0)


def test_universal_mode_runs(table):
    model = UniversalNoise.isotropic(0.05)
    cfg = ExperimentConfig(J=20, k=3, n=4, noise_model=model,
                           mode="universal", master_seed=3)
    matrix = run_experiment(cfg, table=table)
    assert matrix.values.shape == (3, 4)
    assert np.all((matrix.values >= 0.0) & (matrix.values <= 1.0))


def test_row_average_and_grand_mean():
    values = np.array([[0.5, 0.7], [0.9, 1.0]])
    matrix = FidelityMatrix(values=values, J=2)
    assert np.allclose(row_average(matrix), [0.6, 0.95])
    assert grand_mean(matrix) == pytest.approx(0.775, rel=1e-15)


def test_fidelity_csv_round_trip(table, tmp_path):
    cfg = ExperimentConfig(J=12, k=4, n=3, noise_model=DC(0.08),
                           master_seed=9)
    matrix = run_experiment(cfg, table=table)
    csv_path = tmp_path / "matrix.csv"
    sidecar = tmp_path / "matrix.json"
    write_fidelity_csv(csv_path, matrix, sidecar_path=sidecar)
    back = read_fidelity_csv(csv_path, sidecar_path=sidecar)
    assert np.array_equal(back.values, matrix.values)
    assert back.J == matrix.J
    assert back.config["noise_model"] == {"kind": "dc", "sigma": 0.08}


def test_fidelity_csv_17_digit_precision(tmp_path):
    value = 1.0 / 3.0
    matrix = FidelityMatrix(values=np.array([[value]]), J=1)
    path = tmp_path / "matrix.csv"
    write_fidelity_csv(path, matrix)
    assert read_fidelity_csv(path).values[0, 0] == value


def test_read_fidelity_rejects_ragged(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("delta_1,delta_2\n0.5\n")
    with pytest.raises(ValueError):
        read_fidelity_csv(path)
