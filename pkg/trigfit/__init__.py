"""
Trigonometric Fitting Package
Initial parameter estimation and least-squares refinement of cosine models
for unevenly sampled, noisy signals.
"""

from trigfit.errors import (
    TrigFitError,
    InvalidInputError,
    DegenerateInputError,
    DataFormatError,
    InvalidConfigError,
    FitError,
)
from trigfit.signal_model import (
    SampledSignal,
    ModelParams,
    FitResult,
    evaluate_model,
    evaluate_many,
    chi_squared,
    chi_squared_grid,
    jacobian_row,
    jacobian,
    residuals,
    snr_db,
    wrap_phase,
    normalize_params,
)
from trigfit.synth import SynthConfig, DEFAULT_PARAMS, generate, sigma_for_snr
from trigfit.fipeft import (
    DistanceBranch,
    SignalStats,
    CrossingSet,
    DistanceAnalysis,
    FipeftResult,
    estimate_initial_params,
    estimate_with_trace,
    estimate_frequency_stage,
)
from trigfit.lombscargle import (
    FrequencyGrid,
    Periodogram,
    frequency_grid,
    power_at,
    periodogram,
    peak_frequency,
    estimate_initial_params_ls,
)
from trigfit.lmfit import LMConfig, LMTrace, LMResult, lm_fit, fit_signal, solve_damped_step
from trigfit.work_counter import WorkCounter

__all__ = [
    # Errors
    "TrigFitError",
    "InvalidInputError",
    "DegenerateInputError",
    "DataFormatError",
    "InvalidConfigError",
    "FitError",
    # Signal Model
    "SampledSignal",
    "ModelParams",
    "FitResult",
    "evaluate_model",
    "evaluate_many",
    "chi_squared",
    "chi_squared_grid",
    "jacobian_row",
    "jacobian",
    "residuals",
    "snr_db",
    "wrap_phase",
    "normalize_params",
    # Synthetic Signals
    "SynthConfig",
    "DEFAULT_PARAMS",
    "generate",
    "sigma_for_snr",
    # Crossing-Based Estimation
    "DistanceBranch",
    "SignalStats",
    "CrossingSet",
    "DistanceAnalysis",
    "FipeftResult",
    "estimate_initial_params",
    "estimate_with_trace",
    "estimate_frequency_stage",
    # Periodogram
    "FrequencyGrid",
    "Periodogram",
    "frequency_grid",
    "power_at",
    "periodogram",
    "peak_frequency",
    "estimate_initial_params_ls",
    # Refinement
    "LMConfig",
    "LMTrace",
    "LMResult",
    "lm_fit",
    "fit_signal",
    "solve_damped_step",
    # Instrumentation
    "WorkCounter",
]
