"""Rankine-Hugoniot construction and shock hypotheses for Riemann data."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .errors import DegenerateDataError
from .model import ModelParams, State, b1, b2, eigenvalues, flux

_LOGGER = logging.getLogger("dshock.riemann")

H1_MARGIN = 1e-12
DEFAULT_S_MAX = 0.05


@dataclass(frozen=True)
class RiemannData:
    """Left and right states of a Riemann problem placed at x = 0."""

    uL: State
    uR: State

    def swapped(self) -> "RiemannData":
        return RiemannData(uL=self.uR, uR=self.uL)

    @staticmethod
    def from_dict(data_dict: Dict[str, Any]) -> "RiemannData":
        return RiemannData(
            uL=State(float(data_dict["beta_l"]), float(data_dict["v_l"])),
            uR=State(float(data_dict["beta_r"]), float(data_dict["v_r"])),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta_l": self.uL.beta,
            "v_l": self.uL.v,
            "beta_r": self.uR.beta,
            "v_r": self.uR.v,
        }


@dataclass(frozen=True, eq=False)
class ShockQuantities:
    """Shock speed, slow variables and deficit of Riemann data."""

    s: float
    """Shock speed from the first Rankine-Hugoniot condition."""

    wL: np.ndarray
    """f(uL) - s uL"""

    wR: np.ndarray
    """f(uR) - s uR"""

    e0: float
    """Deficit w2L - w2R in the second condition."""

    data: Optional[RiemannData] = None
    """Riemann data these were computed from (None when built by hand)."""

    @property
    def w1L(self) -> float:
        return float(self.wL[0])

    @property
    def w2L(self) -> float:
        return float(self.wL[1])

    @property
    def w1R(self) -> float:
        return float(self.wR[0])

    @property
    def w2R(self) -> float:
        return float(self.wR[1])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "wL": [self.w1L, self.w2L],
            "wR": [self.w1R, self.w2R],
            "e0": self.e0,
        }


@dataclass
class Classification:
    """Verdicts for one set of Riemann data."""

    degenerate: bool
    """True when beta_L = beta_R and no shock speed exists."""

    quantities: Optional[ShockQuantities] = None
    h1: bool = False
    h2: bool = False
    h3_sufficient: bool = False
    in_region: bool = False
    boundary_signs: bool = False
    real_part_left: float = math.nan
    real_part_right: float = math.nan

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degenerate": self.degenerate,
            "shock": self.quantities.to_dict() if self.quantities else None,
            "h1": self.h1,
            "h2": self.h2,
            "h3_sufficient": self.h3_sufficient,
            "in_overcompressive_region": self.in_region,
            "boundary_signs": self.boundary_signs,
            "real_part_left": self.real_part_left,
            "real_part_right": self.real_part_right,
        }


@dataclass
class BoundaryCurves:
    """Sampled boundary of the over-compressive region for a fixed uL."""

    beta: np.ndarray

    v_left: np.ndarray
    """Curve on which s = Re lambda(uL) (NaN where invalid)."""

    v_right: np.ndarray
    """Curve on which s = Re lambda(uR) (NaN where invalid)."""

    @property
    def valid_left(self) -> np.ndarray:
        return np.isfinite(self.v_left)

    @property
    def valid_right(self) -> np.ndarray:
        return np.isfinite(self.v_right)


@dataclass
class RegionGrid:
    """uR samples of the region for a fixed uL."""

    beta: np.ndarray
    v: np.ndarray
    h1: np.ndarray = field(repr=False)
    in_region: np.ndarray = field(repr=False)


# -----------------------------------------------------------------------------


def shock_speed(rd: RiemannData, p: ModelParams) -> float:
    """s = (vL B1(betaL) - vR B1(betaR)) / (betaL - betaR)."""
    uL, uR = rd.uL, rd.uR
    if uL.beta == uR.beta:
        raise DegenerateDataError(
            "beta_L = beta_R: shock speed "
            "s = (v_L B1(beta_L) - v_R B1(beta_R)) / (beta_L - beta_R) is undefined"
        )

    return (uL.v * b1(uL.beta, p) - uR.v * b1(uR.beta, p)) / (uL.beta - uR.beta)


def shock_quantities(rd: RiemannData, p: ModelParams) -> ShockQuantities:
    s = shock_speed(rd, p)
    wL = flux(rd.uL, p) - s * rd.uL.as_array()
    wR = flux(rd.uR, p) - s * rd.uR.as_array()

    return ShockQuantities(
        s=s, wL=wL, wR=wR, e0=float(wL[1] - wR[1]), data=rd
    )


def check_h1(rd: RiemannData, p: ModelParams, margin: float = H1_MARGIN) -> bool:
    """Re lambda(uR) < s < Re lambda(uL), strictly."""
    try:
        s = shock_speed(rd, p)
    except DegenerateDataError:
        return False

    real_left = eigenvalues(rd.uL, p).real_part
    real_right = eigenvalues(rd.uR, p).real_part

    return (real_right + margin) < s < (real_left - margin)


def check_h2(rd: RiemannData, p: ModelParams) -> bool:
    """Positive deficit e0 > 0."""
    try:
        sq = shock_quantities(rd, p)
    except DegenerateDataError:
        return False

    return sq.e0 > 0


def boundary_sign_check(sq: ShockQuantities, p: ModelParams) -> bool:
    """s rho1 + w1L < 0 and s rho2 + w1R < 0."""
    return ((sq.s * p.rho1 + sq.w1L) < 0) and ((sq.s * p.rho2 + sq.w1R) < 0)


def check_h3_sufficient(
    rd: RiemannData,
    sq: ShockQuantities,
    p: ModelParams,
    s_max: float = DEFAULT_S_MAX,
) -> bool:
    """Structural sufficient condition for the connecting orbits.

    The authoritative test integrates the orbits (see singular.check_h3).
    """
    return (
        (rd.uR.beta < p.beta_star < rd.uL.beta)
        and (sq.w1L < 0)
        and (sq.w2R < 0 < sq.w2L)
        and (abs(sq.s) < s_max)
    )


# -----------------------------------------------------------------------------


def curve_left(beta, uL: State, p: ModelParams):
    """v on the curve where s = Re lambda(uL)."""
    beta_arr = np.asarray(beta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = (
            uL.v
            * (b1(uL.beta, p) - 2.0 * b2(uL.beta, p) * (uL.beta - beta_arr))
            / b1(beta_arr, p)
        )

    return np.where(np.isfinite(value), value, np.nan)


def curve_right(beta, uL: State, p: ModelParams):
    """v on the curve where s = Re lambda(uR)."""
    beta_arr = np.asarray(beta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = (
            uL.v
            * b1(uL.beta, p)
            / (b1(beta_arr, p) + 2.0 * b2(beta_arr, p) * (uL.beta - beta_arr))
        )

    return np.where(np.isfinite(value), value, np.nan)


def oc_boundary_curves(uL: State, p: ModelParams, n_samples: int = 200) -> BoundaryCurves:
    """Sample both boundary curves on [rho2, betaL]."""
    assert n_samples >= 2, "Need at least two samples"
    beta = np.linspace(p.rho2, uL.beta, n_samples)

    return BoundaryCurves(
        beta=beta, v_left=curve_left(beta, uL, p), v_right=curve_right(beta, uL, p)
    )


def in_overcompressive_region(rd: RiemannData, p: ModelParams) -> bool:
    """True if uR lies strictly inside the over-compressive region of uL."""
    uL, uR = rd.uL, rd.uR
    if not p.rho2 < uR.beta < uL.beta:
        return False

    upper = float(curve_left(uR.beta, uL, p))
    lower = float(curve_right(uR.beta, uL, p))
    if not (math.isfinite(upper) and math.isfinite(lower)):
        return False

    if (upper <= 0) or (lower <= 0):
        # Region lies in the half-plane v > 0
        return False

    return lower < uR.v < upper


def classify(rd: RiemannData, p: ModelParams, s_max: float = DEFAULT_S_MAX) -> Classification:
    """Compute shock quantities and every hypothesis verdict."""
    try:
        sq = shock_quantities(rd, p)
    except DegenerateDataError:
        _LOGGER.debug("Degenerate Riemann data: %s", rd)
        return Classification(degenerate=True)

    return Classification(
        degenerate=False,
        quantities=sq,
        h1=check_h1(rd, p),
        h2=sq.e0 > 0,
        h3_sufficient=check_h3_sufficient(rd, sq, p, s_max=s_max),
        in_region=in_overcompressive_region(rd, p),
        boundary_signs=boundary_sign_check(sq, p),
        real_part_left=eigenvalues(rd.uL, p).real_part,
        real_part_right=eigenvalues(rd.uR, p).real_part,
    )


def region_grid(
    uL: State, p: ModelParams, n_beta: int = 50, n_v: int = 50, v_max: Optional[float] = None
) -> RegionGrid:
    """Evaluate H1 and region membership on an interior uR grid."""
    if v_max is None:
        v_max = 2.0 * uL.v

    # Open intervals (rho2, betaL) x (0, v_max)
    beta = np.linspace(p.rho2, uL.beta, n_beta + 2)[1:-1]
    v = np.linspace(0.0, v_max, n_v + 2)[1:-1]

    h1 = np.zeros((n_beta, n_v), dtype=bool)
    in_region = np.zeros((n_beta, n_v), dtype=bool)
    for i, beta_r in enumerate(beta):
        for j, v_r in enumerate(v):
            rd = RiemannData(uL=uL, uR=State(float(beta_r), float(v_r)))
            h1[i, j] = check_h1(rd, p)
            in_region[i, j] = in_overcompressive_region(rd, p)

    return RegionGrid(beta=beta, v=v, h1=h1, in_region=in_region)
