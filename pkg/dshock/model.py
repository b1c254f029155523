"""Model functions, flux and eigenstructure of the two-phase flow system.

    beta_t + (v B1(beta))_x = 0
    v_t + (v^2 B2(beta))_x = 0

with B1(beta) = (beta - rho1)(beta - rho2) / beta and
B2(beta) = (beta^2 - rho1 rho2) / (2 beta^2).
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Union

import numpy as np

from .errors import DomainError, InvalidParamsError

ArrayLike = Union[float, np.ndarray]

HYPERBOLIC_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Densities of the two phases."""

    rho1: float = 2.0
    """Heavier density (upper end of the physical strip)."""

    rho2: float = 1.0
    """Lighter density (lower end of the physical strip)."""

    def __post_init__(self):
        if not (math.isfinite(self.rho1) and math.isfinite(self.rho2)):
            raise InvalidParamsError(f"Non-finite densities: {self}")

        if not 0 < self.rho2 < self.rho1:
            raise InvalidParamsError(
                f"Densities must satisfy 0 < rho2 < rho1, got rho1={self.rho1}, rho2={self.rho2}"
            )

    @property
    def beta_star(self) -> float:
        """Root of B2, sqrt(rho1 rho2)."""
        return math.sqrt(self.rho1 * self.rho2)

    def in_strip(self, beta: float, tol: float = 0.0) -> bool:
        """True if rho2 <= beta <= rho1 (widened by tol)."""
        return (self.rho2 - tol) <= beta <= (self.rho1 + tol)

    def to_dict(self) -> Dict[str, Any]:
        return {"rho1": self.rho1, "rho2": self.rho2}


@dataclass(frozen=True)
class State:
    """Conserved state (beta, v)."""

    beta: float
    """Density-weighted volume element."""

    v: float
    """Momentum difference."""

    def as_array(self) -> np.ndarray:
        return np.array([self.beta, self.v], dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        return {"beta": self.beta, "v": self.v}


@dataclass(frozen=True)
class EigenPair:
    """Characteristic speeds of the flux Jacobian."""

    lambda_plus: complex
    lambda_minus: complex

    real_part: float
    """Common real part 2 v B2(beta)."""

    @property
    def is_real(self) -> bool:
        return self.lambda_plus.imag == 0.0


# -----------------------------------------------------------------------------


def _beta_array(beta: ArrayLike) -> np.ndarray:
    beta_arr = np.asarray(beta, dtype=float)
    if np.any(beta_arr == 0.0):
        raise DomainError("B1 and B2 have a pole at beta = 0")

    return beta_arr


def _result(value: np.ndarray) -> ArrayLike:
    if value.ndim == 0:
        return float(value)

    return value


def b1(beta: ArrayLike, p: ModelParams) -> ArrayLike:
    """B1(beta) = (beta - rho1)(beta - rho2) / beta."""
    beta_arr = _beta_array(beta)
    return _result((beta_arr - p.rho1) * (beta_arr - p.rho2) / beta_arr)


def b2(beta: ArrayLike, p: ModelParams) -> ArrayLike:
    """B2(beta) = (beta^2 - rho1 rho2) / (2 beta^2)."""
    beta_arr = _beta_array(beta)
    beta_sq = beta_arr * beta_arr
    return _result((beta_sq - p.rho1 * p.rho2) / (2.0 * beta_sq))


def b1_prime(beta: ArrayLike, p: ModelParams) -> ArrayLike:
    """B1'(beta) = 1 - rho1 rho2 / beta^2 (equal to 2 B2)."""
    beta_arr = _beta_array(beta)
    return _result(1.0 - (p.rho1 * p.rho2) / (beta_arr * beta_arr))


def b2_prime(beta: ArrayLike, p: ModelParams) -> ArrayLike:
    """B2'(beta) = rho1 rho2 / beta^3."""
    beta_arr = _beta_array(beta)
    return _result((p.rho1 * p.rho2) / (beta_arr**3))


def _components(u: Union[State, np.ndarray, Sequence[float]]):
    if isinstance(u, State):
        return u.beta, u.v

    u_arr = np.asarray(u, dtype=float)
    return u_arr[0], u_arr[1]


def flux(u: Union[State, np.ndarray], p: ModelParams) -> np.ndarray:
    """Flux f(u) = (v B1(beta), v^2 B2(beta)).

    Accepts a State or an array of shape (2, ...) and returns shape (2, ...).
    """
    beta, v = _components(u)
    return np.stack(
        [
            np.asarray(v * b1(beta, p), dtype=float),
            np.asarray(v * v * b2(beta, p), dtype=float),
        ]
    )


def jacobian(u: Union[State, np.ndarray], p: ModelParams) -> np.ndarray:
    """Df(u) = [[v B1', B1], [v^2 B2', 2 v B2]]."""
    beta, v = _components(u)
    beta = float(beta)
    v = float(v)

    return np.array(
        [
            [v * b1_prime(beta, p), b1(beta, p)],
            [v * v * b2_prime(beta, p), 2.0 * v * b2(beta, p)],
        ]
    )


def eigenvalues(u: Union[State, np.ndarray], p: ModelParams) -> EigenPair:
    """lambda = 2 v B2 +/- v sqrt(B1 B2'), complex when B1 B2' < 0."""
    beta, v = _components(u)
    beta = float(beta)
    v = float(v)

    real_part = 2.0 * v * b2(beta, p)
    radical = complex(np.emath.sqrt(b1(beta, p) * b2_prime(beta, p)))

    return EigenPair(
        lambda_plus=complex(real_part) + v * radical,
        lambda_minus=complex(real_part) - v * radical,
        real_part=real_part,
    )


def is_hyperbolic(
    u: Union[State, np.ndarray], p: ModelParams, tol: float = HYPERBOLIC_TOL
) -> bool:
    """True if the characteristic speeds at u are real."""
    beta, v = _components(u)
    if abs(v) <= tol:
        return True

    return bool(b1(beta, p) * b2_prime(beta, p) >= -tol)


def speed_bound(beta: ArrayLike, v: ArrayLike, p: ModelParams) -> ArrayLike:
    """|Re lambda| + |Im lambda| bound |v| (2 |B2| + sqrt(|B1 B2'|)), per cell."""
    beta_arr = _beta_array(beta)
    v_arr = np.asarray(v, dtype=float)
    radical = np.sqrt(np.abs(b1(beta_arr, p) * b2_prime(beta_arr, p)))

    return _result(np.abs(v_arr) * (2.0 * np.abs(b2(beta_arr, p)) + radical))


# -----------------------------------------------------------------------------
# Frozen fast system (w, xi fixed) in the (beta, v) plane


def bendixson_divergence(beta: ArrayLike, v: ArrayLike, s: float, p: ModelParams):
    """Divergence 4 v B2(beta) - 2 s of the fast field frozen at xi = s."""
    return _result(4.0 * np.asarray(v, dtype=float) * b2(beta, p) - 2.0 * s)


def theta1(beta: ArrayLike, s: float, w1: float, p: ModelParams) -> ArrayLike:
    """Null-cline of beta: v = beta (s beta + w1) / ((beta - rho1)(beta - rho2))."""
    beta_arr = _beta_array(beta)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = (beta_arr * (s * beta_arr + w1)) / (
            (beta_arr - p.rho1) * (beta_arr - p.rho2)
        )

    return _result(value)


def theta2(beta: ArrayLike, s: float, w2: float, p: ModelParams) -> ArrayLike:
    """Positive null-cline branch of v.

    NaN where the discriminant is negative or beta = sqrt(rho1 rho2).
    """
    beta_arr = _beta_array(beta)
    gap = beta_arr * beta_arr - p.rho1 * p.rho2
    disc = (s * beta_arr) ** 2 + 2.0 * w2 * gap
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.where(
            (disc >= 0) & (gap != 0),
            beta_arr * (s * beta_arr + np.sqrt(np.abs(disc))) / gap,
            np.nan,
        )

    return _result(value)
