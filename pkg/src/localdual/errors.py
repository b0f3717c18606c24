"""Exception types shared across the package."""


class LocaldualError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(LocaldualError):
    """A constructed object violates one of its stated invariants."""


class ConfigError(LocaldualError):
    """An experiment configuration failed validation; message carries the field path."""


class DivergenceError(LocaldualError):
    """An iterate became nonfinite or exceeded the divergence guard."""

    def __init__(self, message, round_index=None, stepsize=None):
        super().__init__(message)
        self.round_index = round_index
        self.stepsize = stepsize


class BudgetExceededError(LocaldualError):
    """An inner solver ran out of rounds before certifying its target gap."""

    def __init__(self, message, achieved_gap=None, rounds_used=None):
        super().__init__(message)
        self.achieved_gap = achieved_gap
        self.rounds_used = rounds_used
