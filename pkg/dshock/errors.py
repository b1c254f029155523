"""Errors for dshock."""

from typing import Optional, Sequence


class DShockError(Exception):
    """Base class for dshock errors"""


class ValidationError(DShockError):
    """Input rejected before any computation (CLI exit code 1)."""


class NumericalError(DShockError):
    """A computation ran but could not produce a trustworthy result (CLI exit code 2)."""


# -----------------------------------------------------------------------------


class ConfigError(ValidationError):
    """Error in a run configuration."""

    def __init__(self, field: str, message: str, line: Optional[int] = None):
        super().__init__(field, message, line)
        self.field = field
        self.message = message
        self.line = line

    def __str__(self) -> str:
        if self.line is not None:
            return f"{self.field} (line {self.line}): {self.message}"

        return f"{self.field}: {self.message}"


class DomainError(ValidationError):
    """Error when a model function is evaluated at its pole beta = 0."""


class InvalidParamsError(ValidationError):
    """Error when model or grid parameters are out of range (e.g. densities with rho2 >= rho1)."""


class DegenerateDataError(ValidationError):
    """Error when beta_L = beta_R, so s = (v_L B1(beta_L) - v_R B1(beta_R)) / (beta_L - beta_R) is undefined."""


class DimensionError(ValidationError):
    """Error when a state vector does not match its vector field."""


# -----------------------------------------------------------------------------


class StiffnessError(NumericalError):
    """Error when the adaptive step size underflows."""


class SeedingError(NumericalError):
    """Error when the unstable plane at the seed equilibrium is not 2-dimensional."""


class NoConfigurationError(NumericalError):
    """Error when the deficit e0 is not positive."""


class AssemblyError(NumericalError):
    """Error when pieces of a singular configuration do not join."""


class H3Error(NumericalError):
    """Error when a connecting orbit required by (H3) could not be computed."""


class WindowError(NumericalError):
    """Error when a computation does not fit the requested xi window."""


class SpikeTooSmallError(NumericalError):
    """Error when a profile never crosses the requested r = r0 section."""


class NoConvergenceError(NumericalError):
    """Error when shooting stagnates above tolerance."""

    def __init__(self, message: str, residual: float, parameters: Sequence[float]):
        super().__init__(message)
        self.residual = residual
        self.parameters = tuple(parameters)

    def __str__(self) -> str:
        return (
            f"{self.args[0]} (best residual {self.residual:.3e} "
            f"at {self.parameters})"
        )


class FvBlowUpError(NumericalError):
    """Error when a finite-volume cell becomes non-finite."""

    def __init__(self, step: int):
        super().__init__(f"Non-finite cell value at step {step}")
        self.step = step
