"""Exception types raised by Thiele."""


class ThieleError(Exception):
    """Base class for every error raised by the engine."""


class DomainError(ThieleError, ValueError):
    """An input lies outside the domain an operation is defined on."""


class ConfigurationError(ThieleError, ValueError):
    """Inputs are individually valid but do not fit together."""


class NumericalError(ThieleError, ArithmeticError):
    """A solver produced a non-finite value."""

    def __init__(self, message: str, time: float, gain: float | None = None):
        super().__init__(message)
        self.time = time
        self.gain = gain


class StageError(ThieleError):
    """A scenario pipeline stage failed; ``stage`` names the module at fault."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
