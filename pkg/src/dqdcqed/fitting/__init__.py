"""Peak extraction, Hamiltonian and master-equation fits, synthetic data."""
from .fit import (
    CONTROL_SCALE,
    FitProblem,
    FitResult,
    FreeParameter,
    ParameterEstimate,
    ScalingFit,
    Stage,
    exchange_scaling_fit,
    hamiltonian_fit,
    master_equation_fit,
    residual_at,
    simulate_trace,
    staged_fit,
)
from .optimize import simplex_minimize
from .peaks import Peak, count_minima, lorentzian_peaks, minima_positions, multi_lorentzian
from .traces import PHASE, REFLECTION, MeasuredTrace, estimate_sigma, read_measured_csv, synthesize_dataset

__all__ = [
    "CONTROL_SCALE",
    "FitProblem",
    "FitResult",
    "FreeParameter",
    "MeasuredTrace",
    "PHASE",
    "ParameterEstimate",
    "Peak",
    "REFLECTION",
    "ScalingFit",
    "Stage",
    "count_minima",
    "estimate_sigma",
    "exchange_scaling_fit",
    "hamiltonian_fit",
    "lorentzian_peaks",
    "master_equation_fit",
    "minima_positions",
    "multi_lorentzian",
    "read_measured_csv",
    "residual_at",
    "simplex_minimize",
    "simulate_trace",
    "staged_fit",
    "synthesize_dataset",
]
