"""Random-walk reduction: step directions, endpoints, and fidelity link."""

import numpy as np
import pytest

from rbwalk.clifford import SequenceSpec
from rbwalk.noise import DC, Markovian, UniversalNoise, sample_realization
from rbwalk.simulator import noisy_sequence_unitary, trace_fidelity
from rbwalk.walk import (
    WalkVector,
    fidelity_approx,
    lattice_vector,
    lattice_walk_distance_pdf,
    markovian_fourth_order_correction,
    sample_lattice_endpoints,
    universal_walk_vectors,
    walk_path,
    walk_vector,
    write_walk_path_csv,
)


def test_walk_vector_identity_sequence(table):
    # All-identity prefixes keep the direction on +Z, so R = (0, 0, sum).
    seq = SequenceSpec(indices=(1, 1, 1, 1))
    noise = np.array([0.1, -0.2, 0.3, 0.05])
    vec = walk_vector(seq, noise, table)
    assert np.allclose(vec.R, [0.0, 0.0, noise.sum()])
    assert vec.squared_norm == pytest.approx(noise.sum() ** 2)


def test_walk_vector_matches_manual_sum(table):
    rng = np.random.default_rng(0)
    seq = table.sample_sequence(12, rng)
    noise = rng.normal(0.0, 0.1, 12)
    directions = table.twirl_directions(seq)
    manual = sum(noise[m] * directions[m] for m in range(12))
    assert np.allclose(walk_vector(seq, noise, table).R, manual)


def test_walk_path_ends_at_walk_vector(table):
    rng = np.random.default_rng(1)
    seq = table.sample_sequence(9, rng)
    noise = rng.normal(0.0, 0.2, 9)
    path = walk_path(seq, noise, table)
    assert path.shape == (9, 3)
    assert np.allclose(path[-1], walk_vector(seq, noise, table).R)


def test_walk_vector_length_check(table):
    seq = SequenceSpec(indices=(1, 1))
    with pytest.raises(ValueError):
        walk_vector(seq, np.zeros(3), table)
    with pytest.raises(ValueError):
        walk_path(seq, np.zeros(3), table)


def test_lattice_vector_is_unit_noise_walk(table):
    rng = np.random.default_rng(2)
    seq = table.sample_sequence(15, rng)
    assert np.array_equal(lattice_vector(seq, table),
                          walk_vector(seq, np.ones(15), table).R.astype(int))


def test_sample_lattice_endpoints_distribution(table):
    # E ||V||^2 = J exactly (unit steps, independent directions).
    rng = np.random.default_rng(3)
    J, count = 30, 20000
    V = sample_lattice_endpoints(J, count, rng, table)
    assert V.shape == (count, 3)
    assert V.dtype == np.int64
    sq = np.sum(V.astype(float) ** 2, axis=1)
    se = np.std(sq, ddof=1) / np.sqrt(count)
    assert abs(np.mean(sq) - J) < 3.0 * se


def test_sample_lattice_endpoints_matches_sequence_sampling(table):
    # The batched endpoint sampler agrees in distribution with explicit
    # per-sequence lattice vectors: compare means of ||V||^2.
    J, count = 10, 4000
    rng = np.random.default_rng(4)
    batched = sample_lattice_endpoints(J, count, rng, table)
    explicit = np.stack([
        lattice_vector(table.sample_sequence(J, rng), table)
        for _ in range(count)
    ])
    a = np.sum(batched.astype(float) ** 2, axis=1)
    b = np.sum(explicit.astype(float) ** 2, axis=1)
    pooled_se = np.sqrt(np.var(a, ddof=1) / count + np.var(b, ddof=1) / count)
    assert abs(a.mean() - b.mean()) < 4.0 * pooled_se


def test_universal_walk_vectors(table):
    rng = np.random.default_rng(5)
    seq = table.sample_sequence(8, rng)
    noise = sample_realization(UniversalNoise.isotropic(0.1), 8, rng)
    vectors = universal_walk_vectors(seq, noise, table)
    assert set(vectors) == {"X", "Y", "Z"}
    for axis, i in (("X", 0), ("Y", 1), ("Z", 2)):
        expected = walk_vector(seq, noise[:, i], table, axis=axis)
        assert np.allclose(vectors[axis].R, expected.R)
    with pytest.raises(ValueError):
        universal_walk_vectors(seq, noise[:, 0], table)


def test_markovian_fourth_order_correction_value():
    assert markovian_fourth_order_correction(100, 0.015) == pytest.approx(
        (2.0 / 3.0) * 1e4 * 0.015**4)


def test_fidelity_approx_tracks_exact(table):
    # Walk prediction vs exact trace fidelity for one DC batch.
    rng = np.random.default_rng(6)
    seq = table.sample_sequence(40, rng)
    batch = np.stack([sample_realization(DC(0.01), 40, rng)
                      for _ in range(200)])
    approx = fidelity_approx(seq, batch, table, regime="dc")
    exact = np.mean([
        trace_fidelity(noisy_sequence_unitary(seq, row, table))
        for row in batch
    ])
    assert approx == pytest.approx(exact, abs=5e-5)


def test_fidelity_approx_validation(table):
    seq = SequenceSpec(indices=(1, 1))
    with pytest.raises(ValueError):
        fidelity_approx(seq, np.zeros((2, 2)), table, regime="unknown")
    with pytest.raises(ValueError):
        fidelity_approx(seq, np.zeros((2, 3)), table, regime="dc")
    with pytest.raises(ValueError):
        fidelity_approx(seq, np.zeros((2, 2)), table, regime="markovian")


def test_fidelity_approx_markovian_correction(table):
    seq = SequenceSpec(indices=(1, 1, 1))
    batch = np.zeros((1, 3))
    plain = fidelity_approx(seq, batch, table, regime="dc")
    corrected = fidelity_approx(seq, batch, table, regime="markovian",
                                sigma=0.1)
    assert corrected - plain == pytest.approx(
        markovian_fourth_order_correction(3, 0.1))


def test_lattice_walk_distance_pdf_normalized():
    pdf = lattice_walk_distance_pdf(99)
    r = np.linspace(0.0, 60.0, 20001)
    integral = np.trapezoid(pdf(r), r)
    assert integral == pytest.approx(1.0, abs=1e-10)
    mode = r[np.argmax(pdf(r))]
    assert mode == pytest.approx(np.sqrt(2.0 * 99 / 3.0), abs=0.01)
    with pytest.raises(ValueError):
        lattice_walk_distance_pdf(0)


def test_write_walk_path_csv(table, tmp_path):
    rng = np.random.default_rng(7)
    seq = table.sample_sequence(5, rng)
    path = walk_path(seq, rng.normal(0.0, 0.1, 5), table)
    out = tmp_path / "path.csv"
    write_walk_path_csv(out, path)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "j,x,y,z"
    assert len(lines) == 6
    parsed = np.array([[float(v) for v in line.split(",")[1:]]
                       for line in lines[1:]])
    assert np.array_equal(parsed, path)


def test_walk_vector_dataclass():
    vec = WalkVector(R=np.array([1.0, 2.0, 2.0]))
    assert vec.squared_norm == pytest.approx(9.0)
