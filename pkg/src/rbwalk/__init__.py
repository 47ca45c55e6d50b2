"""Randomized-benchmarking statistics under temporally correlated noise.

Simulates single-qubit randomized benchmarking with correlated unitary
errors, reduces sequences to Pauli-space random walks, and evaluates the
matching closed-form gamma-family fidelity distributions, moments, and
confidence-bound sample sizes.
"""

__version__ = "0.1.0"

from .analytics import (
    GammaLaw,
    RegimeMoments,
    confidence_failure,
    dc_finite_n_pdf,
    fidelity_law,
    gamma_pdf,
    generic_gamma_params,
    k_min,
    psd_to_autocorrelation,
    regime_moments,
)
from .clifford import CliffordElement, CliffordTable, PauliAxis, SequenceSpec, build_table
from .noise import (
    DC,
    Block,
    FourierPSD,
    Markovian,
    UniversalNoise,
    analytic_autocorrelation,
    calibrate_amplitude,
    empirical_autocorrelation,
    power_law_weights,
    sample_realization,
)
from .simulator import (
    ExperimentConfig,
    FidelityMatrix,
    grand_mean,
    noisy_sequence_unitary,
    row_average,
    run_experiment,
    trace_fidelity,
)
from .walk import (
    WalkVector,
    fidelity_approx,
    lattice_walk_distance_pdf,
    walk_vector,
)

__all__ = [
    "GammaLaw", "RegimeMoments", "confidence_failure", "dc_finite_n_pdf",
    "fidelity_law", "gamma_pdf", "generic_gamma_params", "k_min",
    "psd_to_autocorrelation", "regime_moments",
    "CliffordElement", "CliffordTable", "PauliAxis", "SequenceSpec",
    "build_table",
    "DC", "Block", "FourierPSD", "Markovian", "UniversalNoise",
    "analytic_autocorrelation", "calibrate_amplitude",
    "empirical_autocorrelation", "power_law_weights", "sample_realization",
    "ExperimentConfig", "FidelityMatrix", "grand_mean",
    "noisy_sequence_unitary", "row_average", "run_experiment",
    "trace_fidelity",
    "WalkVector", "fidelity_approx", "lattice_walk_distance_pdf",
    "walk_vector",
]
