"""Exception and warning types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all haptosim errors."""


class FieldError(SimulationError):
    """A field array is malformed: wrong shape, non-finite, or out of range."""


class ConfigError(SimulationError):
    """A configuration file, key, or value is invalid."""


class StepRejected(SimulationError):
    """A trial step produced an invalid state; retry with a smaller dt."""


class NumericalError(SimulationError):
    """The integration cannot continue (dt underflow or step budget exhausted).

    Carries the partial run result, when one exists, as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class StabilityFloorWarning(UserWarning):
    """The stability bound fell below dt_min; dt_min is used instead."""
