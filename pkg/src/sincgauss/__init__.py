"""Gaussian-family approximations to sinc phase matching in SPDC.

Closed-form and quadrature fidelities between the sinc phase-matched
biphoton state and its Gaussian, super-Gaussian, cosine-Gaussian, and
cosine-super-Gaussian surrogates; optimal approximation factors; and the
fully analytical Laguerre-Gaussian mode decomposition of the approximated
state with its quadrature oracle.
"""
from .model import (
    FAMILIES,
    ApproxSpec,
    CrystalOptics,
    PumpSpec,
    TransverseKinematics,
    delta_kz,
    load_preset,
    phase_matching_value,
)
from .numerics import (
    DivergenceError,
    NonConvergenceError,
    OptimResult,
    QuadSpec,
    erf,
    maximize,
    quad_nd,
    quad_semi_infinite,
    reg_hyp2f1,
)
from .fidelity import (
    FidelityReport,
    NormConstants,
    SweepPoint,
    closed_form,
    default_t0_grid,
    fidelity_cosinegaussian_closed,
    fidelity_gaussian_closed,
    fidelity_report,
    fidelity_spatial_oracle,
    fidelity_spectral_oracle,
    fidelity_spatiotemporal_oracle,
    fidelity_supergaussian_closed,
    norm_constants,
    optimize_factors,
    pump_dominated_t0,
    sinc_dominated_t0,
    sweep,
)
from .lgdecomp import (
    AmplitudeTable,
    CoefficientBlock,
    ModeIndices,
    amplitude,
    amplitude_analytic,
    amplitude_conjugate,
    amplitude_oracle,
    amplitude_table,
    coefficient_block,
    lg_mode,
    schmidt_number,
    spiral_spectrum,
    t_coeff,
)

__version__ = "0.1.0"

__all__ = [
    "FAMILIES", "ApproxSpec", "CrystalOptics", "PumpSpec", "TransverseKinematics",
    "delta_kz", "load_preset", "phase_matching_value",
    "DivergenceError", "NonConvergenceError", "OptimResult", "QuadSpec",
    "erf", "maximize", "quad_nd", "quad_semi_infinite", "reg_hyp2f1",
    "FidelityReport", "NormConstants", "SweepPoint", "closed_form",
    "default_t0_grid", "fidelity_cosinegaussian_closed", "fidelity_gaussian_closed",
    "fidelity_report", "fidelity_spatial_oracle", "fidelity_spectral_oracle",
    "fidelity_spatiotemporal_oracle", "fidelity_supergaussian_closed",
    "norm_constants", "optimize_factors", "pump_dominated_t0", "sinc_dominated_t0",
    "sweep",
    "AmplitudeTable", "CoefficientBlock", "ModeIndices", "amplitude",
    "amplitude_analytic", "amplitude_conjugate", "amplitude_oracle",
    "amplitude_table", "coefficient_block", "lg_mode", "schmidt_number",
    "spiral_spectrum", "t_coeff",
    "__version__",
]
