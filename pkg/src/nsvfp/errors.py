"""Exception types shared across the solver stack."""


class SimulationError(Exception):
    """Base class for everything this package raises on purpose."""


class ConfigError(SimulationError):
    """Malformed or invalid scenario configuration.

    ``line`` is the 1-based line number in the config text when the problem
    can be pinned to one, ``field`` the offending key.
    """

    def __init__(self, message, line=None, field=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.field = field


class DegenerateInputError(SimulationError):
    """Input data outside the domain a routine is defined on (e.g. zero total mass)."""


class StepRejectedError(SimulationError):
    """A substep refused ``dt``.  ``admissible_dt`` carries the largest

    acceptable value; ``state`` is attached by ``full_step`` so the caller
    gets its untouched input back with the error.
    """

    def __init__(self, message, admissible_dt, state=None):
        super().__init__(message)
        self.admissible_dt = admissible_dt
        self.state = state


class NumericalBlowupError(SimulationError):
    """NaN/Inf detected in a result, or a linear solve broke down."""
