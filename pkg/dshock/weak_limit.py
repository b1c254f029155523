"""Distributional limit of computed profiles.

As eps -> 0 the profile converges weakly to uL on xi < s, uR on xi > s and a
delta of strength (0, e0) at xi = s. The spike itself is integrated with the
clock zeta of the (r, kappa) chart, using v dxi = eps dzeta.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy.integrate import quad, trapezoid
from scipy.special import exprel, logsumexp

from .errors import WindowError
from .model import ModelParams, eigenvalues
from .profile import ProfileResult, crossings, sample_crossings
from .riemann import ShockQuantities

_LOGGER = logging.getLogger("dshock.weak_limit")


@dataclass(frozen=True)
class TestFunction:
    """Smooth test function with compact support [lo, hi]."""

    __test__ = False

    fn: Callable[[np.ndarray], np.ndarray]
    support: Tuple[float, float]

    def __call__(self, xi) -> np.ndarray:
        return self.fn(np.asarray(xi, dtype=float))


def bump(center: float, half_width: float, height: float = 1.0) -> TestFunction:
    """exp(1 - 1 / (1 - x^2)) on |x| < 1 with x = (xi - center) / half_width."""
    assert half_width > 0, "Bump needs a positive width"

    def _bump(xi: np.ndarray) -> np.ndarray:
        x = (xi - center) / half_width
        inside = np.abs(x) < 1.0
        safe = np.where(inside, x, 0.0)
        return np.where(inside, height * np.exp(1.0 - 1.0 / (1.0 - safe * safe)), 0.0)

    return TestFunction(_bump, (center - half_width, center + half_width))


def zero_function(support: Tuple[float, float]) -> TestFunction:
    return TestFunction(lambda xi: np.zeros_like(xi), support)


@dataclass
class WeakLimitReport:
    """Weak-limit diagnostics of one profile."""

    eps: float
    e0: float
    xi_in: float
    xi_out: float

    delta_strength: float
    """Integral of v over [xi_in, xi_out] by quadrature."""

    identity_value: float
    """Same integral as eps times the chart clock between the crossings."""

    excess_strength: float
    """Integral of v minus the step background uL | uR over the whole window.

    Equals e0 up to the landing residual, since w2' = -v and w2 runs from
    wL to wR along the background. delta_strength falls short of it by the
    mass of the approach to and the return from r = r0, which is of order
    eps log(1 / r0).
    """

    beta_inner: float
    outer_L1_left: float
    outer_L1_right: float

    tail_left: float
    tail_right: float
    """Estimated L1 mass outside the computed window."""

    pairing_errors: Dict[str, List[float]] = field(default_factory=dict)

    @property
    def identity_gap(self) -> float:
        """Relative disagreement of the two inner integrals."""
        return abs(self.delta_strength - self.identity_value) / abs(self.identity_value)

    @property
    def strength_error(self) -> float:
        """Relative distance of delta_strength from e0."""
        return abs(self.delta_strength - self.e0) / abs(self.e0)

    @property
    def excess_error(self) -> float:
        return abs(self.excess_strength - self.e0) / abs(self.e0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "e0": self.e0,
            "xi_in": self.xi_in,
            "xi_out": self.xi_out,
            "delta_strength": self.delta_strength,
            "identity_value": self.identity_value,
            "identity_gap": self.identity_gap,
            "strength_error": self.strength_error,
            "excess_strength": self.excess_strength,
            "excess_error": self.excess_error,
            "beta_inner": self.beta_inner,
            "outer_L1_left": self.outer_L1_left,
            "outer_L1_right": self.outer_L1_right,
            "tail_left": self.tail_left,
            "tail_right": self.tail_right,
            "pairing_errors": self.pairing_errors,
        }


# -----------------------------------------------------------------------------


def _crossing_pair(pr: ProfileResult, r0: Optional[float]) -> Tuple[Tuple[float, float], ...]:
    """First and last (xi, zeta) on r = r0."""
    xi_in, xi_out = crossings(pr, r0)
    if (r0 is None) or (r0 == pr.r0):
        found = pr.r0_crossings
    else:
        found = sample_crossings(pr, r0)

    assert found[0][0] == xi_in and found[-1][0] == xi_out
    return found[0], found[-1]


def _log_v(pr: ProfileResult) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        from_v = np.where(pr.v > 0, np.log(np.abs(pr.v)), np.nan)

    return np.where(np.isfinite(pr.kappa), pr.kappa / pr.eps, from_v)


def log_trapezoid(xi: np.ndarray, log_values: np.ndarray) -> float:
    """log of the integral of exp(log_values), exact for piecewise linear log_values.

    Each panel contributes dxi * exp(max) * exprel(-|difference|).
    """
    widths = np.diff(xi)
    lo, hi = log_values[:-1], log_values[1:]
    top = np.maximum(lo, hi)
    spread = np.abs(hi - lo)
    keep = widths > 0
    if not np.any(keep):
        return -math.inf

    panels = np.log(widths[keep]) + top[keep] + np.log(exprel(-spread[keep]))

    return float(logsumexp(panels))


def _outer(
    pr: ProfileResult, lo: float, hi: float, edge: float, edge_v: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Samples on [lo, hi] with the crossing point appended at edge."""
    mask = (pr.xi >= lo) & (pr.xi <= hi)
    edge_beta = float(np.interp(edge, pr.xi, pr.beta))
    xi = np.append(pr.xi[mask], edge)
    beta = np.append(pr.beta[mask], edge_beta)
    v = np.append(pr.v[mask], edge_v)
    order = np.argsort(xi, kind="stable")

    return xi[order], beta[order], v[order]


def _inner(
    pr: ProfileResult, start: Tuple[float, float], end: Tuple[float, float], r0: float
) -> Dict[str, np.ndarray]:
    """Samples strictly between the crossings plus both crossing points."""
    mask = (pr.xi > start[0]) & (pr.xi < end[0])
    edge_log_v = -math.log(r0)

    def _edges(values: np.ndarray, first: float, last: float) -> np.ndarray:
        return np.concatenate([[first], values[mask], [last]])

    return {
        "xi": _edges(pr.xi, start[0], end[0]),
        "zeta": _edges(pr.zeta, start[1], end[1]),
        "beta": _edges(
            pr.beta,
            float(np.interp(start[0], pr.xi, pr.beta)),
            float(np.interp(end[0], pr.xi, pr.beta)),
        ),
        "log_v": _edges(_log_v(pr), edge_log_v, edge_log_v),
    }


def _background_mass(sq: ShockQuantities, lo: float, hi: float) -> float:
    """Integral over [lo, hi] of v for the step uL | uR at s."""
    assert sq.data is not None, "Shock quantities carry no Riemann data"
    left = max(0.0, min(hi, sq.s) - lo)
    right = max(0.0, hi - max(lo, sq.s))

    return sq.data.uL.v * left + sq.data.uR.v * right


def analyze(
    pr: ProfileResult,
    sq: ShockQuantities,
    p: ModelParams,
    r0: Optional[float] = None,
    test_functions: Optional[Mapping[str, TestFunction]] = None,
) -> WeakLimitReport:
    """Delta strength, outer convergence and pairing errors of a profile."""
    assert sq.data is not None, "Shock quantities carry no Riemann data"
    r0 = pr.r0 if r0 is None else r0
    start, end = _crossing_pair(pr, r0)
    xi_in, xi_out = start[0], end[0]

    inner = _inner(pr, start, end, r0)
    usable = np.isfinite(inner["log_v"])
    if not np.all(usable):
        _LOGGER.warning(
            "Skipping %s inner samples without a positive v", int(np.sum(~usable))
        )

    delta_strength = math.exp(log_trapezoid(inner["xi"][usable], inner["log_v"][usable]))
    identity_value = pr.eps * (end[1] - start[1])
    beta_inner = float(trapezoid(inner["beta"], inner["xi"]))

    uL, uR = sq.data.uL, sq.data.uR
    edge_v = 1.0 / r0
    xi_l, beta_l, v_l = _outer(pr, pr.xi[0], xi_in, xi_in, edge_v)
    xi_r, beta_r, v_r = _outer(pr, xi_out, pr.xi[-1], xi_out, edge_v)
    outer_left = float(trapezoid(np.abs(beta_l - uL.beta) + np.abs(v_l - uL.v), xi_l))
    outer_right = float(trapezoid(np.abs(beta_r - uR.beta) + np.abs(v_r - uR.v), xi_r))

    window_v = delta_strength + float(trapezoid(v_l, xi_l)) + float(trapezoid(v_r, xi_r))
    excess_strength = window_v - _background_mass(sq, pr.xi[0], pr.xi[-1])

    # Departure decays like exp(-mu |xi - xi_edge| / eps) beyond the window
    mu_left = eigenvalues(uL, p).real_part - pr.xi[0]
    mu_right = pr.xi[-1] - eigenvalues(uR, p).real_part
    dev_left = abs(pr.beta[0] - uL.beta) + abs(pr.v[0] - uL.v)
    dev_right = abs(pr.beta[-1] - uR.beta) + abs(pr.v[-1] - uR.v)
    tail_left = dev_left * pr.eps / mu_left if mu_left > 0 else math.inf
    tail_right = dev_right * pr.eps / mu_right if mu_right > 0 else math.inf

    pairing_errors: Dict[str, List[float]] = {}
    for name, psi in (test_functions or {}).items():
        pairing_errors[name] = [float(x) for x in pair_similarity(pr, sq, psi, r0=r0)]

    report = WeakLimitReport(
        eps=pr.eps,
        e0=sq.e0,
        xi_in=xi_in,
        xi_out=xi_out,
        delta_strength=delta_strength,
        identity_value=identity_value,
        excess_strength=excess_strength,
        beta_inner=beta_inner,
        outer_L1_left=outer_left,
        outer_L1_right=outer_right,
        tail_left=tail_left,
        tail_right=tail_right,
        pairing_errors=pairing_errors,
    )
    _LOGGER.debug(
        "eps=%s: delta strength %.6f (identity %.6f), e0 %.6f",
        pr.eps,
        delta_strength,
        identity_value,
        sq.e0,
    )

    return report


def limit_pairing(sq: ShockQuantities, psi: TestFunction) -> np.ndarray:
    """uL int_{-inf}^s psi + uR int_s^inf psi + (0, e0) psi(s)."""
    assert sq.data is not None, "Shock quantities carry no Riemann data"
    lo, hi = psi.support

    def _integral(a: float, b: float) -> float:
        if b <= a:
            return 0.0

        value, _error = quad(lambda x: float(psi(x)), a, b, limit=200)
        return float(value)

    left = _integral(lo, min(sq.s, hi))
    right = _integral(max(sq.s, lo), hi)
    at_s = float(psi(sq.s))

    return (
        left * sq.data.uL.as_array()
        + right * sq.data.uR.as_array()
        + np.array([0.0, sq.e0 * at_s])
    )


def pair_similarity(
    pr: ProfileResult,
    sq: ShockQuantities,
    psi: TestFunction,
    r0: Optional[float] = None,
) -> np.ndarray:
    """Pairing of psi with the profile minus its limit value (a 2-vector)."""
    lo, hi = psi.support
    if (lo < pr.xi[0]) or (hi > pr.xi[-1]):
        raise WindowError(
            f"Support [{lo}, {hi}] exceeds the profile window [{pr.xi[0]}, {pr.xi[-1]}]"
        )

    r0 = pr.r0 if r0 is None else r0
    start, end = _crossing_pair(pr, r0)
    xi_in, xi_out = start[0], end[0]

    beta_part = float(trapezoid(psi(pr.xi) * pr.beta, pr.xi))

    # Outside the spike v is bounded by 1 / r0
    edge_v = 1.0 / r0
    xi_l, _beta_l, v_l = _outer(pr, pr.xi[0], xi_in, xi_in, edge_v)
    xi_r, _beta_r, v_r = _outer(pr, xi_out, pr.xi[-1], xi_out, edge_v)
    v_part = float(trapezoid(psi(xi_l) * v_l, xi_l)) + float(
        trapezoid(psi(xi_r) * v_r, xi_r)
    )

    # Inside, psi v dxi = eps psi dzeta
    inner = _inner(pr, start, end, r0)
    v_part += pr.eps * float(trapezoid(psi(inner["xi"]), inner["zeta"]))

    return np.array([beta_part, v_part]) - limit_pairing(sq, psi)


def spacetime_delta_coefficient(sq: ShockQuantities) -> float:
    """e0 / sqrt(1 + s^2), the weight of t delta on x = s t."""
    return sq.e0 / math.sqrt(1.0 + sq.s * sq.s)
