"""Vector fields of the fast-slow system and its charts.

State layouts:

* SF_BV: (beta, v, w1, w2, xi)
* FAST_BV: (beta, v) with (w, xi) frozen
* SF_BRK: (beta, r, w1, w2, xi, kappa) with r = 1/v, kappa = eps log v,
  time rescaled by r
* FAST_BRK: (beta, r) with (w, xi) frozen
* DAFERMOS_XI: (beta, v, w1, w2) with xi as the independent variable
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DimensionError
from .model import ModelParams

RightHandSide = Callable[[float, np.ndarray], np.ndarray]


class VectorFieldId(str, Enum):
    """Vector fields known to the integrator."""

    SF_BV = "sf_bv"
    FAST_BV = "fast_bv"
    SF_BRK = "sf_brk"
    FAST_BRK = "fast_brk"
    DAFERMOS_XI = "dafermos_xi"
    HARMONIC = "harmonic"
    """Test oscillator y'' = -y."""

    @property
    def dim(self) -> int:
        return _DIMS[self]


_DIMS = {
    VectorFieldId.SF_BV: 5,
    VectorFieldId.FAST_BV: 2,
    VectorFieldId.SF_BRK: 6,
    VectorFieldId.FAST_BRK: 2,
    VectorFieldId.DAFERMOS_XI: 4,
    VectorFieldId.HARMONIC: 2,
}


@dataclass(frozen=True)
class VectorField:
    """Right-hand side bound to its parameters."""

    id: VectorFieldId
    rhs: RightHandSide

    @property
    def dim(self) -> int:
        return self.id.dim

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        return self.rhs(t, y)


def make_field(
    field_id: VectorFieldId,
    p: Optional[ModelParams] = None,
    eps: float = 0.0,
    w: Optional[Sequence[float]] = None,
    xi: Optional[float] = None,
) -> VectorField:
    """Bind a vector field to its parameters.

    Frozen fields (FAST_BV, FAST_BRK) need w and xi; the eps-dependent
    fields need eps > 0 only when the slow variables are meant to move.
    """
    if field_id == VectorFieldId.HARMONIC:
        return VectorField(field_id, _harmonic)

    assert p is not None, "Model parameters required"
    rho1, rho2 = p.rho1, p.rho2
    rho_prod = rho1 * rho2

    # Scalar forms of B1, B2 (pole checks happen in model.py)
    def _b1(beta: float) -> float:
        return (beta - rho1) * (beta - rho2) / beta

    def _b2(beta: float) -> float:
        return (beta * beta - rho_prod) / (2.0 * beta * beta)

    if field_id in (VectorFieldId.FAST_BV, VectorFieldId.FAST_BRK):
        if (w is None) or (xi is None):
            raise DimensionError(f"{field_id.value} needs frozen w and xi")

        w1, w2 = float(w[0]), float(w[1])
        xi_frozen = float(xi)

        if field_id == VectorFieldId.FAST_BV:

            def fast_bv(t: float, y: np.ndarray) -> np.ndarray:
                beta, v = y[0], y[1]
                return np.array(
                    [
                        v * _b1(beta) - xi_frozen * beta - w1,
                        v * v * _b2(beta) - xi_frozen * v - w2,
                    ]
                )

            return VectorField(field_id, fast_bv)

        def fast_brk(t: float, y: np.ndarray) -> np.ndarray:
            beta, r = y[0], y[1]
            return np.array(
                [
                    _b1(beta) - xi_frozen * beta * r - w1 * r,
                    -r * _b2(beta) + xi_frozen * r * r + w2 * r**3,
                ]
            )

        return VectorField(field_id, fast_brk)

    if field_id == VectorFieldId.SF_BV:

        def sf_bv(t: float, y: np.ndarray) -> np.ndarray:
            beta, v, w1_, w2_, xi_ = y
            return np.array(
                [
                    v * _b1(beta) - xi_ * beta - w1_,
                    v * v * _b2(beta) - xi_ * v - w2_,
                    -eps * beta,
                    -eps * v,
                    eps,
                ]
            )

        return VectorField(field_id, sf_bv)

    if field_id == VectorFieldId.SF_BRK:

        def sf_brk(t: float, y: np.ndarray) -> np.ndarray:
            beta, r, w1_, w2_, xi_, _kappa = y
            b2_beta = _b2(beta)
            return np.array(
                [
                    _b1(beta) - xi_ * beta * r - w1_ * r,
                    -r * b2_beta + xi_ * r * r + w2_ * r**3,
                    -eps * beta * r,
                    -eps,
                    eps * r,
                    eps * (b2_beta - xi_ * r - w2_ * r * r),
                ]
            )

        return VectorField(field_id, sf_brk)

    if field_id == VectorFieldId.DAFERMOS_XI:
        if eps <= 0:
            raise DimensionError("dafermos_xi needs eps > 0")

        def dafermos_xi(xi_: float, y: np.ndarray) -> np.ndarray:
            beta, v, w1_, w2_ = y
            return np.array(
                [
                    (v * _b1(beta) - xi_ * beta - w1_) / eps,
                    (v * v * _b2(beta) - xi_ * v - w2_) / eps,
                    -beta,
                    -v,
                ]
            )

        return VectorField(field_id, dafermos_xi)

    raise DimensionError(f"Unknown vector field: {field_id}")


def _harmonic(t: float, y: np.ndarray) -> np.ndarray:
    return np.array([y[1], -y[0]])


def finite_difference_jacobian(
    rhs: RightHandSide, y: Sequence[float], h: float = 1e-6, t: float = 0.0
) -> np.ndarray:
    """Central-difference Jacobian of rhs at y."""
    y_arr = np.asarray(y, dtype=float)
    n = len(y_arr)
    jac = np.zeros((n, n))
    for j in range(n):
        step = np.zeros(n)
        step[j] = h
        jac[:, j] = (rhs(t, y_arr + step) - rhs(t, y_arr - step)) / (2.0 * h)

    return jac


def collocation_defect(rhs: RightHandSide, t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Relative collocation defect of samples (t[i], y[i]) of y' = rhs(t, y).

    Each interval is interpolated by the cubic Hermite polynomial through
    its end values and end slopes. The defect is the mismatch between the
    polynomial's slope and rhs at the interval midpoint, relative to
    1 + |rhs|, maximized over components. Intervals of zero length give nan.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if (y.ndim != 2) or (len(t) != len(y)):
        raise DimensionError(f"Samples need shape (n, dim), got {y.shape} for {len(t)} times")

    slopes = np.array([rhs(t_i, y_i) for t_i, y_i in zip(t, y)])
    defect = np.full(max(len(t) - 1, 0), np.nan)
    for i in range(len(t) - 1):
        h = t[i + 1] - t[i]
        if h == 0:
            continue

        y0, y1 = y[i], y[i + 1]
        f0, f1 = slopes[i], slopes[i + 1]
        y_mid = 0.5 * (y0 + y1) - 0.125 * h * (f1 - f0)
        slope_mid = 1.5 * (y1 - y0) / h - 0.25 * (f0 + f1)
        f_mid = rhs(t[i] + 0.5 * h, y_mid)
        defect[i] = np.max(np.abs(slope_mid - f_mid) / (1.0 + np.abs(f_mid)))

    return defect
