"""Exception types shared across the library.

Infeasibility (a requested operating point that no admissible power can
reach) is kept separate from plain validation errors so callers can
distinguish "your config is malformed" from "this link cannot do that".
"""


class AbgsemError(Exception):
    """Base class for library-specific failures."""


class InfeasibleError(AbgsemError):
    """Requested operating point cannot be met by any admissible power."""


class TargetUnreachableError(InfeasibleError):
    """Metric target at or above the saturation ceiling alpha."""


class LevelUnreachableError(InfeasibleError):
    """Per-user quality level at or above that user's ceiling."""


class InfeasibleBoxError(InfeasibleError):
    """Power box is empty (rate floor exceeds the power cap) or budget too small."""


class ZeroChannelError(InfeasibleError):
    """Channel gain is zero, so no finite power reaches any positive SNR."""


class InsufficientSamplesError(AbgsemError, ValueError):
    """Too few samples, or too few distinct abscissae, to fit the model."""


class NonFiniteSampleError(AbgsemError, ValueError):
    """Sample set contains NaN or infinite values."""


class NoDescentError(AbgsemError):
    """Every fit start failed to produce a finite objective."""


class IterationLimitError(AbgsemError):
    """Iterative solver hit its iteration cap before meeting tolerance."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class EmptyUserSetError(AbgsemError, ValueError):
    """Allocation requested for an empty user set."""
