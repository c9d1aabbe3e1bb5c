"""
Exceptions raised by the correlation engine.

Invalid physical inputs raise ValueError at construction time. Everything
that can go wrong while solving raises a CorrelationError subclass so the
sweep runner can turn it into a row status.
"""

from typing import Optional


class CorrelationError(Exception):
    """Base class for numerical failures of the engine."""

    status = "error"


class ConfigError(CorrelationError, ValueError):
    """A sweep configuration could not be parsed or has an invalid field."""

    def __init__(self, field: str, message: str, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}{location}: {message}")


class UnstableGeneratorError(CorrelationError):
    """An order block has an eigenvalue with real part >= -eps_stab."""

    status = "unstable"

    def __init__(self, order: int, eigenvalue: complex):
        self.order = order
        self.eigenvalue = complex(eigenvalue)
        super().__init__(
            f"order {order} block is not strictly damped "
            f"(eigenvalue {self.eigenvalue.real:.3e}{self.eigenvalue.imag:+.3e}j)"
        )


class SingularBlockError(CorrelationError):
    """An order block is numerically singular."""

    status = "singular"

    def __init__(self, order: int, condition: float):
        self.order = order
        self.condition = condition
        super().__init__(f"order {order} block is singular (condition {condition:.3e})")


class StepFailureError(CorrelationError):
    """The adaptive integrator could not meet the requested tolerance."""

    status = "step_failure"


class NonPhysicalMomentsError(CorrelationError):
    """A moment that must be real and non-negative is not."""

    status = "nonphysical"

    def __init__(self, index, value: complex):
        self.index = tuple(index)
        self.value = complex(value)
        super().__init__(f"moment {self.index} = {self.value} is not physical")


class NoConvergenceError(CorrelationError):
    """A density-matrix steady-state search stopped without meeting its residual."""

    status = "no_convergence"

    def __init__(self, residual: float, message: str = ""):
        self.residual = residual
        super().__init__(f"steady state not reached (residual {residual:.3e}) {message}".strip())
