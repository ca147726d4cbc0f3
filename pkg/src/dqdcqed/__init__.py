"""Steady-state spectra, eigen analysis and fits for two double quantum dots in a resonator."""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    CqedError,
    DegenerateInputError,
    DimensionError,
    InvalidTruncationError,
    NonUniqueSteadyStateError,
    SolverError,
    UnderdeterminedInitializationError,
    UnsupportedCombinationError,
)
from .model import (  # noqa: E402
    DqdParams,
    HilbertLayout,
    NoiseSpectrum,
    ProbeParams,
    ResonatorParams,
    SystemConfig,
    load_config,
    save_config,
    set_param,
    get_param,
)
from .solver import reflection_coefficient, spectrum_trace, steady_state, sweep_2d  # noqa: E402

__all__ = [
    "ConfigError",
    "CqedError",
    "DegenerateInputError",
    "DimensionError",
    "DqdParams",
    "HilbertLayout",
    "InvalidTruncationError",
    "NoiseSpectrum",
    "NonUniqueSteadyStateError",
    "ProbeParams",
    "ResonatorParams",
    "SolverError",
    "SystemConfig",
    "UnderdeterminedInitializationError",
    "UnsupportedCombinationError",
    "get_param",
    "load_config",
    "reflection_coefficient",
    "save_config",
    "set_param",
    "spectrum_trace",
    "steady_state",
    "sweep_2d",
]
