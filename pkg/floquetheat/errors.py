"""Exceptions raised by :mod:`floquetheat`.

Every error carries enough context to say *where* a computation failed: the
configuration key, the quadrature term, the sideband, or the simulation time. Extra
context is passed as keyword arguments with defaults so that the exceptions survive
pickling across worker processes."""

import math
from typing import Any, Optional, Sequence


class FloquetHeatError(Exception):
    "Base class for all errors raised by ``floquetheat``."


class ConfigError(FloquetHeatError):
    """Raised when a configuration file cannot be parsed or holds invalid values.

    >>> str(ConfigError("must be >= 0", key="reservoirs.0.temperature"))
    'reservoirs.0.temperature: must be >= 0'
    >>> str(ConfigError("Expected '='", line=3))
    "line 3: Expected '='"
    """

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if key is not None:
            prefix.append(key)
        super().__init__(": ".join([*prefix, message]) if prefix else message)


class ValidationError(FloquetHeatError):
    "Raised when a network model or a reservoir violates one of its invariants."


class DomainError(FloquetHeatError, ValueError):
    "Raised when a function is evaluated outside of its mathematical domain."


class RangeError(FloquetHeatError, ValueError):
    "Raised when tabulated data is evaluated outside of its grid."


class QuadratureError(FloquetHeatError):
    """Raised when adaptive quadrature does not reach the requested tolerance.

    The partial estimate and the achieved error are kept so that callers can decide
    whether the result is still usable."""

    def __init__(
        self,
        message: str,
        achieved: float = math.nan,
        estimate: Any = None,
        term: Optional[Sequence] = None,
    ):
        self.achieved = achieved
        self.estimate = estimate
        self.term = term
        if term is not None:
            message = f"{message} [term {tuple(term)}]"
        super().__init__(f"{message} (achieved error {achieved:.3e})")


class InstabilityError(FloquetHeatError):
    "Raised when the sideband system is singular or too ill-conditioned to trust."

    def __init__(self, message: str, sideband: Optional[int] = None, condition: float = math.inf):
        self.sideband = sideband
        self.condition = condition
        super().__init__(message)


class UnsupportedConfigurationError(FloquetHeatError):
    "Raised when an operation is called on a configuration it is not valid for."


class DegeneracyError(FloquetHeatError):
    "Raised when two normal frequencies are closer than their resonance widths allow."


class OutOfRegimeError(FloquetHeatError):
    "Raised when an approximation is evaluated outside of its validity regime."


class GridMismatchError(FloquetHeatError):
    "Raised when two solutions that must share a frequency grid do not."


class StepSizeError(FloquetHeatError):
    "Raised when the cooling ODE integrator can no longer make progress."

    def __init__(self, message: str, last_state: Optional[tuple] = None):
        self.last_state = last_state
        if last_state is not None:
            message = f"{message} (last state t={last_state[0]:.6g}, T={last_state[1]:.6g})"
        super().__init__(message)


class OracleError(FloquetHeatError):
    "Raised when the time-domain simulation blows up or cannot be trusted."

    def __init__(self, message: str, time: float = math.nan):
        self.time = time
        if not math.isnan(time):
            message = f"{message} (at t={time:.6g})"
        super().__init__(message)


if __name__ == "__main__":
    import doctest

    doctest.testmod()
