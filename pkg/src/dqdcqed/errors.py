"""Exception hierarchy shared by all modules."""


class CqedError(Exception):
    """Base class for every error raised by this package."""


class InvalidTruncationError(CqedError, ValueError):
    pass


class DimensionError(CqedError, ValueError):
    pass


class UnsupportedCombinationError(CqedError, ValueError):
    pass


class ConfigError(CqedError, ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class NonUniqueSteadyStateError(CqedError, ArithmeticError):
    def __init__(self, kernel_dim):
        self.kernel_dim = kernel_dim
        super().__init__(
            f"Liouvillian kernel has dimension {kernel_dim}; steady state is not unique"
        )


class SolverError(CqedError, ArithmeticError):
    """Steady-state solve failed at a specific probe frequency."""

    def __init__(self, omega_p, cause):
        self.omega_p = omega_p
        self.cause = cause
        super().__init__(f"steady-state solve failed at nu_p = {omega_p:.6g} MHz: {cause}")


class DegenerateInputError(CqedError, ValueError):
    pass


class UnderdeterminedInitializationError(CqedError, ValueError):
    pass
