"""Exception hierarchy."""


class TricavError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(TricavError, ValueError):
    """A parameter is missing, out of range, or inconsistent."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class BosonicApproximationError(TricavError, ValueError):
    """The single-atom excitation probability is too large for the bosonic atomic mode."""


class UnstableSystemError(TricavError, ArithmeticError):
    """The linearized dynamics has no steady state (drift matrix not Hurwitz)."""

    def __init__(self, message, max_real_part=None):
        self.max_real_part = max_real_part
        super().__init__(message)


class NumericalError(TricavError, ArithmeticError):
    """A numerical routine failed (non-convergence, step underflow, ...)."""


class ConfigError(TricavError, ValueError):
    """Configuration text could not be parsed or violates the schema."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
