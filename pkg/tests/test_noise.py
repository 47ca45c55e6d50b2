"""Structure, statistics, and serialization of the noise generators."""

import numpy as np
import pytest

from rbwalk.noise import (
    DC,
    Block,
    FourierPSD,
    Markovian,
    UniversalNoise,
    analytic_autocorrelation,
    calibrate_amplitude,
    empirical_autocorrelation,
    model_from_dict,
    model_to_dict,
    power_law_weights,
    read_realizations_csv,
    sample_realization,
    write_realizations_csv,
)


def test_model_validation():
    with pytest.raises(ValueError):
        Markovian(sigma=-0.1)
    with pytest.raises(ValueError):
        Block(sigma=0.1, block_length=0)
    with pytest.raises(ValueError):
        FourierPSD(weights=(), mode_spacing=1.0, amplitude=1.0, gate_time=1.0)
    with pytest.raises(ValueError):
        FourierPSD(weights=(1.0,), mode_spacing=0.0, amplitude=1.0,
                   gate_time=1.0)
    with pytest.raises(ValueError):
        UniversalNoise()


def test_sigma_zero_is_noiseless():
    rng = np.random.default_rng(0)
    for model in (Markovian(0.0), DC(0.0), Block(0.0, 5)):
        assert np.all(sample_realization(model, 20, rng) == 0.0)


def test_markovian_draws_are_independent():
    rng = np.random.default_rng(1)
    draws = np.stack([sample_realization(Markovian(0.3), 50, rng)
                      for _ in range(4000)])
    assert np.std(draws) == pytest.approx(0.3, rel=0.02)
    lag1 = np.mean(draws[:, :-1] * draws[:, 1:])
    assert abs(lag1) < 3.0 * 0.3**2 / np.sqrt(draws[:, 1:].size)


def test_dc_is_constant_per_realization():
    rng = np.random.default_rng(2)
    draw = sample_realization(DC(0.5), 30, rng)
    assert draw.shape == (30,)
    assert np.ptp(draw) == 0.0
    another = sample_realization(DC(0.5), 30, rng)
    assert draw[0] != another[0]


def test_block_structure_and_truncation():
    rng = np.random.default_rng(3)
    draw = sample_realization(Block(0.5, block_length=4), 10, rng)
    assert np.ptp(draw[0:4]) == 0.0
    assert np.ptp(draw[4:8]) == 0.0
    assert np.ptp(draw[8:10]) == 0.0
    assert len({draw[0], draw[4], draw[8]}) == 3


def test_block_length_one_matches_markovian_stream():
    draw_a = sample_realization(Block(0.2, 1), 25, np.random.default_rng(4))
    draw_b = sample_realization(Markovian(0.2), 25, np.random.default_rng(4))
    assert np.array_equal(draw_a, draw_b)


def test_power_law_weights():
    white = power_law_weights(0.0)
    pink = power_law_weights(-1.0)
    ohmic = power_law_weights(1.0)
    assert white(4) == pytest.approx(0.25)
    assert pink(4) == pytest.approx(4.0 ** -1.5)
    assert ohmic(4) == pytest.approx(0.5)


def test_fourier_variance_matches_empirical():
    model = FourierPSD.power_law(-1.0, mode_count=30, mode_spacing=0.05,
                                 amplitude=0.2, gate_time=1.0)
    rng = np.random.default_rng(5)
    draws = np.stack([sample_realization(model, 64, rng)
                      for _ in range(5000)])
    assert np.var(draws) == pytest.approx(model.variance(), rel=0.05)


def test_calibrate_amplitude_hits_target():
    model = FourierPSD.power_law(0.0, mode_count=10, mode_spacing=0.1,
                                 amplitude=1.0, gate_time=1.0)
    scaled = calibrate_amplitude(model, 2.5e-4)
    assert scaled.variance() == pytest.approx(2.5e-4, rel=1e-12)
    with pytest.raises(ValueError):
        calibrate_amplitude(model, 0.0)


@pytest.mark.parametrize("model", [
    Markovian(0.4),
    DC(0.4),
    Block(0.4, block_length=5),
    FourierPSD.power_law(0.0, 8, 0.3, 0.5, 1.0),
])
def test_empirical_autocorrelation_matches_analytic(model):
    rng = np.random.default_rng(6)
    J = 24
    draws = np.stack([sample_realization(model, J, rng)
                      for _ in range(20000)])
    analytic = analytic_autocorrelation(model, J)
    empirical = empirical_autocorrelation(draws)
    scale = analytic[0]
    assert np.max(np.abs(empirical - analytic)) / scale < 0.05


def test_analytic_autocorrelation_shapes():
    c = analytic_autocorrelation(Markovian(0.3), 10)
    assert c[0] == pytest.approx(0.09)
    assert np.all(c[1:] == 0.0)
    c = analytic_autocorrelation(DC(0.3), 10)
    assert np.all(c == pytest.approx(0.09))
    c = analytic_autocorrelation(Block(0.3, 4), 10)
    assert c[2] == pytest.approx(0.09 * 0.5)
    assert np.all(c[4:] == 0.0)


def test_fourier_autocorrelation_lag_zero_is_variance():
    model = FourierPSD.power_law(-1.0, 20, 0.02, 0.3, 1.0)
    c = analytic_autocorrelation(model, 5)
    assert c[0] == pytest.approx(model.variance(), rel=1e-12)


def test_universal_z_only_matches_scalar_stream():
    model = Markovian(0.2)
    scalar = sample_realization(model, 40, np.random.default_rng(7))
    multi = sample_realization(UniversalNoise.z_only(model), 40,
                               np.random.default_rng(7))
    assert multi.shape == (40, 3)
    assert np.all(multi[:, 0] == 0.0)
    assert np.all(multi[:, 1] == 0.0)
    assert np.array_equal(multi[:, 2], scalar)


def test_universal_isotropic_variance_split():
    model = UniversalNoise.isotropic(0.3)
    rng = np.random.default_rng(8)
    draws = np.stack([sample_realization(model, 10, rng)
                      for _ in range(5000)])
    per_axis = np.var(draws, axis=(0, 1))
    assert np.allclose(per_axis, 0.09 / 3.0, rtol=0.1)
    assert per_axis.sum() == pytest.approx(0.09, rel=0.1)


def test_realizations_csv_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    draws = np.stack([sample_realization(Markovian(0.1), 7, rng)
                      for _ in range(5)])
    path = tmp_path / "realizations.csv"
    write_realizations_csv(path, draws)
    back = read_realizations_csv(path)
    assert np.array_equal(back, draws)


def test_read_realizations_rejects_headerless(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0.1,0.2\n0.3,0.4\n")
    with pytest.raises(ValueError):
        read_realizations_csv(path)


@pytest.mark.parametrize("model", [
    Markovian(0.1),
    DC(0.2),
    Block(0.3, 7),
    FourierPSD.power_law(1.0, 5, 0.4, 2.0, 0.5),
    UniversalNoise.z_only(DC(0.2)),
    UniversalNoise.isotropic(0.3),
])
def test_model_dict_round_trip(model):
    assert model_from_dict(model_to_dict(model)) == model


def test_sample_rejects_bad_inputs():
    rng = np.random.default_rng(10)
    with pytest.raises(ValueError):
        sample_realization(Markovian(0.1), 0, rng)
    with pytest.raises(TypeError):
        sample_realization(object(), 5, rng)
