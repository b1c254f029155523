"""Singular configuration and phase-portrait analysis of the fast system.

The configuration joins U_L to U_R through

    gamma1 (fast, w = wL) -> sigma1 (slow on beta = rho1, r = 0)
    -> gamma0 (fast on r = 0) -> sigma2 (slow on beta = rho2, r = 0)
    -> gamma2 (fast, w = wR)

Rows of every sampled piece are chart points (beta, r, w1, w2, xi, kappa).
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import (
    AssemblyError,
    DShockError,
    H3Error,
    NoConfigurationError,
    NumericalError,
    ValidationError,
)
from .fields import VectorFieldId, finite_difference_jacobian, make_field
from .integrate import Event, IntegratorConfig, Termination, integrate
from .model import (
    ModelParams,
    State,
    b1_prime,
    b2,
    bendixson_divergence,
    theta1,
    theta2,
)
from .riemann import (
    RiemannData,
    ShockQuantities,
    boundary_sign_check,
    check_h1,
    shock_quantities,
)
from .util import unit

_LOGGER = logging.getLogger("dshock.singular")

# Relative mismatch above which printed closed forms are reported
_PRINTED_RTOL = 1e-9


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass
class SingularConfig:
    """Settings for the connecting orbits and the assembled configuration."""

    endpoint_tol: float = 1e-6
    """Landing ball radius around (beta, 1/v) of uL or uR."""

    delta: float = 1e-7
    """Seeding offset from the saddle along its eigenvector."""

    t_max: float = 1e4
    """Longest (rescaled) fast time to integrate an orbit."""

    strip_slack: float = 1e-8
    """Tolerance for leaving {rho2 <= beta <= rho1, r >= 0}."""

    r0: float = 0.1
    """Section r = r0 whose crossing is recorded on gamma1 and gamma2."""

    gamma0_tol: float = 1e-10
    """How close gamma0 is integrated to rho1 and rho2."""

    junction_tol: float = 1e-8

    n_slow: int = 50
    """Samples on each slow segment."""

    n_diagnostic: int = 200
    """Samples for null-cline and divergence diagnostics."""

    s_max: float = 0.05

    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)


@dataclass
class SaddleData:
    """Linearization of the frozen fast system at P_L or P_R."""

    side: Side
    point: Tuple[float, float]
    """(beta, r) of the equilibrium."""

    jacobian: np.ndarray
    lambda_u: float
    lambda_s: float
    y_u: np.ndarray
    y_s: np.ndarray

    printed_y_s: Optional[np.ndarray] = None
    """Closed-form stable eigenvector as printed for P_L, scaled to r = 1."""

    warnings: List[str] = field(default_factory=list)


class ConnectionStatus(str, Enum):
    LANDED = "landed"
    LEFT_STRIP = "left_strip"
    INCONCLUSIVE = "inconclusive"
    FAILED = "failed"


@dataclass
class ConnectionResult:
    """A connecting orbit of the frozen fast system in (beta, r)."""

    status: ConnectionStatus
    points: np.ndarray
    """Shape (n, 2), oriented from the U_L side towards the U_R side."""

    residual: float
    """Distance of the last integrated point from the target equilibrium."""

    section_point: Optional[np.ndarray] = None
    """Crossing of r = r0 (the entry/exit point of the spike)."""

    message: str = ""

    @property
    def success(self) -> bool:
        return self.status == ConnectionStatus.LANDED


@dataclass
class SlowQuantities:
    """Slow-time passages along beta = rho1 and beta = rho2."""

    tau10: float
    tau20: float
    w20: float
    kappa0: float

    printed: Dict[str, float] = field(default_factory=dict)
    """Printed closed forms evaluated for comparison."""

    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau10": self.tau10,
            "tau20": self.tau20,
            "w20": self.w20,
            "kappa0": self.kappa0,
            "printed": dict(self.printed),
            "warnings": list(self.warnings),
        }


@dataclass
class H3Report:
    """Numerical H3 verdict plus structural diagnostics."""

    gamma1: ConnectionResult
    gamma2: ConnectionResult

    theta1_increasing: bool
    theta2_decreasing: bool
    theta2_at_rho1: float
    divergence_min: float
    boundary_signs: bool

    @property
    def verified(self) -> bool:
        return self.gamma1.success and self.gamma2.success

    @property
    def structural(self) -> bool:
        return (
            self.theta1_increasing
            and self.theta2_decreasing
            and (self.theta2_at_rho1 > 0)
            and (self.divergence_min > 0)
            and self.boundary_signs
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verified": self.verified,
            "structural": self.structural,
            "gamma1": {
                "status": self.gamma1.status.value,
                "residual": self.gamma1.residual,
            },
            "gamma2": {
                "status": self.gamma2.status.value,
                "residual": self.gamma2.residual,
            },
            "theta1_increasing": self.theta1_increasing,
            "theta2_decreasing": self.theta2_decreasing,
            "theta2_at_rho1": self.theta2_at_rho1,
            "divergence_min": self.divergence_min,
            "boundary_signs": self.boundary_signs,
        }


@dataclass
class SingularConfiguration:
    gamma1: np.ndarray
    sigma1: np.ndarray
    gamma0: np.ndarray
    sigma2: np.ndarray
    gamma2: np.ndarray
    slow: SlowQuantities
    h3: H3Report

    @property
    def pieces(self) -> Dict[str, np.ndarray]:
        return {
            "gamma1": self.gamma1,
            "sigma1": self.sigma1,
            "gamma0": self.gamma0,
            "sigma2": self.sigma2,
            "gamma2": self.gamma2,
        }

    @property
    def max_kappa(self) -> float:
        return max(float(np.max(piece[:, 5])) for piece in self.pieces.values())


@dataclass
class H3GridPoint:
    uR: State
    h1: bool
    h3_structural: bool = False
    h3_verified: bool = False


# -----------------------------------------------------------------------------


def _frozen(side: Side, sq: ShockQuantities) -> Tuple[np.ndarray, float]:
    if side == Side.LEFT:
        return sq.wL, sq.s

    return sq.wR, sq.s


def _data(sq: ShockQuantities) -> RiemannData:
    if sq.data is None:
        raise ValidationError("Shock quantities carry no Riemann data")

    return sq.data


def saddle_at_P(side: Side, sq: ShockQuantities, p: ModelParams) -> SaddleData:
    """Eigendata of the frozen (beta, r) fast field at (rho, 0).

    The Jacobian there is [[B1'(rho), -(s rho + w1)], [0, -B2(rho)]].
    """
    side = Side(side)
    rho = p.rho1 if side == Side.LEFT else p.rho2
    w, s = _frozen(side, sq)
    w1 = float(w[0])

    jac = np.array(
        [
            [b1_prime(rho, p), -(s * rho + w1)],
            [0.0, -b2(rho, p)],
        ]
    )
    eig_values, eig_vectors = np.linalg.eig(jac)
    eig_values = np.real(eig_values)
    eig_vectors = np.real(eig_vectors)

    i_u = int(np.argmax(eig_values))
    i_s = 1 - i_u
    lambda_u, lambda_s = float(eig_values[i_u]), float(eig_values[i_s])
    assert lambda_u > 0 > lambda_s, f"Not a saddle: {eig_values}"

    y_u = _orient(unit(eig_vectors[:, i_u]))
    y_s = _orient(unit(eig_vectors[:, i_s]))

    saddle = SaddleData(
        side=side,
        point=(rho, 0.0),
        jacobian=jac,
        lambda_u=lambda_u,
        lambda_s=lambda_s,
        y_u=y_u,
        y_s=y_s,
    )

    if side == Side.LEFT:
        # Printed stable eigenvector has 3 (rho1 + rho2) in the denominator
        printed_beta = (2 * p.rho1 * (w1 + s * p.rho1)) / (3 * (p.rho1 + p.rho2))
        saddle.printed_y_s = np.array([printed_beta, 1.0])
        derived_beta = y_s[0] / y_s[1]
        if not math.isclose(printed_beta, derived_beta, rel_tol=_PRINTED_RTOL, abs_tol=1e-14):
            message = (
                f"Printed stable eigenvector at P_L has beta-component {printed_beta:.10g}, "
                f"linearization gives {derived_beta:.10g}"
            )
            _LOGGER.warning(message)
            saddle.warnings.append(message)

    return saddle


def _orient(vector: np.ndarray) -> np.ndarray:
    """Sign convention: r-component positive, or beta-component when r vanishes."""
    if abs(vector[1]) > 1e-12:
        return vector if vector[1] > 0 else -vector

    return vector if vector[0] > 0 else -vector


def saddle_fd_jacobian(side: Side, sq: ShockQuantities, p: ModelParams, h: float = 1e-6):
    """Finite-difference Jacobian of the frozen fast field at the saddle."""
    side = Side(side)
    w, s = _frozen(side, sq)
    fast = make_field(VectorFieldId.FAST_BRK, p, w=w, xi=s)
    rho = p.rho1 if side == Side.LEFT else p.rho2

    return finite_difference_jacobian(fast, [rho, 0.0], h=h)


# -----------------------------------------------------------------------------


def _connect(
    side: Side, sq: ShockQuantities, p: ModelParams, cfg: SingularConfig, delta: float
) -> ConnectionResult:
    rd = _data(sq)
    saddle = saddle_at_P(side, sq, p)
    w, s = _frozen(side, sq)
    fast = make_field(VectorFieldId.FAST_BRK, p, w=w, xi=s)

    if side == Side.LEFT:
        # Backward along the stable direction towards uL
        seed_dir = saddle.y_s
        target = np.array([rd.uL.beta, 1.0 / rd.uL.v])
        t_span = (0.0, -cfg.t_max)
    else:
        # Forward along the unstable direction towards uR
        seed_dir = saddle.y_u
        target = np.array([rd.uR.beta, 1.0 / rd.uR.v])
        t_span = (0.0, cfg.t_max)

    y0 = np.array(saddle.point) + delta * seed_dir
    land_radius = 0.5 * cfg.endpoint_tol
    slack = cfg.strip_slack

    events = [
        Event(
            "land",
            lambda t, y: float(np.hypot(y[0] - target[0], y[1] - target[1])) - land_radius,
            terminal=True,
            direction=-1,
        ),
        Event("above_rho1", lambda t, y: y[0] - (p.rho1 + slack), terminal=True, direction=1),
        Event("below_rho2", lambda t, y: (p.rho2 - slack) - y[0], terminal=True, direction=1),
        Event("negative_r", lambda t, y: -slack - y[1], terminal=True, direction=1),
        Event("section", lambda t, y: y[1] - cfg.r0),
    ]

    try:
        traj = integrate(fast, y0, t_span, cfg.integrator, events)
    except NumericalError as err:
        return ConnectionResult(
            status=ConnectionStatus.FAILED,
            points=y0.reshape(1, 2),
            residual=float(np.linalg.norm(y0 - target)),
            message=str(err),
        )

    points = traj.y
    residual = float(np.linalg.norm(traj.final_y - target))
    sections = traj.events_named("section")
    section_point = sections[0].y if sections else None

    if side == Side.LEFT:
        # Read backward run from uL towards P_L
        points = points[::-1]

    end = traj.terminal_event
    if end is not None and end.name == "land":
        status = ConnectionStatus.LANDED
        message = ""
    elif end is not None:
        status = ConnectionStatus.LEFT_STRIP
        message = f"Orbit left the strip ({end.name})"
    elif traj.termination == Termination.BLOW_UP:
        status = ConnectionStatus.FAILED
        message = "Orbit blew up"
    else:
        status = ConnectionStatus.INCONCLUSIVE
        message = f"Stopped without landing ({traj.termination.value})"

    _LOGGER.debug("Orbit from P_%s: %s, residual %.3e", side.value[0].upper(), status.value, residual)

    return ConnectionResult(
        status=status,
        points=points,
        residual=residual,
        section_point=section_point,
        message=message,
    )


def compute_gamma1(
    sq: ShockQuantities,
    p: ModelParams,
    cfg: Optional[SingularConfig] = None,
    delta: Optional[float] = None,
) -> ConnectionResult:
    """Orbit joining (betaL, 1/vL) to P_L = (rho1, 0) with w = wL, xi = s."""
    cfg = cfg or SingularConfig()
    return _connect(Side.LEFT, sq, p, cfg, cfg.delta if delta is None else delta)


def compute_gamma2(
    sq: ShockQuantities,
    p: ModelParams,
    cfg: Optional[SingularConfig] = None,
    delta: Optional[float] = None,
) -> ConnectionResult:
    """Orbit joining P_R = (rho2, 0) to (betaR, 1/vR) with w = wR, xi = s."""
    cfg = cfg or SingularConfig()
    return _connect(Side.RIGHT, sq, p, cfg, cfg.delta if delta is None else delta)


def check_h3(
    sq: ShockQuantities, p: ModelParams, cfg: Optional[SingularConfig] = None
) -> H3Report:
    """Integrate both connecting orbits and evaluate the phase-plane diagnostics."""
    cfg = cfg or SingularConfig()
    rd = _data(sq)

    gamma1 = compute_gamma1(sq, p, cfg)
    gamma2 = compute_gamma2(sq, p, cfg)

    # Null-clines on the open interval (sqrt(rho1 rho2), rho1)
    beta = np.linspace(p.beta_star, p.rho1, cfg.n_diagnostic + 2)[1:-1]
    th1 = np.asarray(theta1(beta, sq.s, sq.w1L, p))
    th2 = np.asarray(theta2(beta, sq.s, sq.w2L, p))
    th1_inc = bool(np.all(np.isfinite(th1)) and np.all(np.diff(th1) > 0))
    th2_dec = bool(np.all(np.isfinite(th2)) and np.all(np.diff(th2) < 0))
    th2_rho1 = float(theta2(p.rho1, sq.s, sq.w2L, p))

    # Divergence over the trapping region [betaL, rho1] x [vL, 10 vL]
    beta_grid, v_grid = np.meshgrid(
        np.linspace(rd.uL.beta, p.rho1, cfg.n_diagnostic),
        np.linspace(rd.uL.v, 10 * rd.uL.v, cfg.n_diagnostic),
    )
    divergence = np.asarray(bendixson_divergence(beta_grid, v_grid, sq.s, p))

    return H3Report(
        gamma1=gamma1,
        gamma2=gamma2,
        theta1_increasing=th1_inc,
        theta2_decreasing=th2_dec,
        theta2_at_rho1=th2_rho1 if math.isfinite(th2_rho1) else math.nan,
        divergence_min=float(np.min(divergence)),
        boundary_signs=boundary_sign_check(sq, p),
    )


# -----------------------------------------------------------------------------


def slow_quantities(sq: ShockQuantities, p: ModelParams) -> SlowQuantities:
    """Solve tau10 + tau20 = e0, B2(rho1) tau10 + B2(rho2) tau20 = 0."""
    if not sq.e0 > 0:
        raise NoConfigurationError(f"Deficit e0 = {sq.e0} is not positive")

    b2_1, b2_2 = b2(p.rho1, p), b2(p.rho2, p)
    tau10, tau20 = np.linalg.solve(
        np.array([[1.0, 1.0], [b2_1, b2_2]]), np.array([sq.e0, 0.0])
    )
    tau10, tau20 = float(tau10), float(tau20)
    kappa0 = b2_1 * tau10
    w20 = sq.w2L - tau10

    rho_sum = p.rho1 + p.rho2
    printed = {
        "tau10": p.rho2 * sq.e0 / rho_sum,
        "tau20": p.rho1 * sq.e0 / rho_sum,
        "kappa0": p.rho1 * (p.rho1 - p.rho2) / (2 * p.rho2 * rho_sum),
        "w20": sq.w2L + p.rho1 * sq.e0 / rho_sum,
        "v_max_limit": (p.rho1 - p.rho2) * sq.e0 / rho_sum,
    }
    derived = {
        "tau10": tau10,
        "tau20": tau20,
        "kappa0": kappa0,
        "w20": w20,
        "v_max_limit": kappa0,
    }

    quantities = SlowQuantities(
        tau10=tau10, tau20=tau20, w20=w20, kappa0=kappa0, printed=printed
    )
    for name, value in derived.items():
        if not math.isclose(printed[name], value, rel_tol=_PRINTED_RTOL, abs_tol=1e-14):
            message = (
                f"Printed {name} = {printed[name]:.10g} differs from linear solve {value:.10g}"
            )
            _LOGGER.warning(message)
            quantities.warnings.append(message)

    return quantities


def _fill(points: np.ndarray, w: np.ndarray, xi: float, kappa: float) -> np.ndarray:
    """Lift (beta, r) samples to chart points with constant slow variables."""
    n = len(points)
    rows = np.empty((n, 6))
    rows[:, 0:2] = points
    rows[:, 2] = w[0]
    rows[:, 3] = w[1]
    rows[:, 4] = xi
    rows[:, 5] = kappa

    return rows


def _gamma0(
    sq: ShockQuantities, p: ModelParams, slow: SlowQuantities, cfg: SingularConfig
) -> np.ndarray:
    """Fast orbit on r = 0 from rho1 down to rho2 (beta' = B1(beta))."""
    fast = make_field(VectorFieldId.FAST_BRK, p, w=(sq.w1L, slow.w20), xi=sq.s)
    mid = np.array([0.5 * (p.rho1 + p.rho2), 0.0])
    tol = cfg.gamma0_tol

    upper = integrate(
        fast,
        mid,
        (0.0, -cfg.t_max),
        cfg.integrator,
        [Event("near_rho1", lambda t, y: (p.rho1 - y[0]) - tol, terminal=True, direction=-1)],
    )
    lower = integrate(
        fast,
        mid,
        (0.0, cfg.t_max),
        cfg.integrator,
        [Event("near_rho2", lambda t, y: (y[0] - p.rho2) - tol, terminal=True, direction=-1)],
    )
    if (upper.terminal_event is None) or (lower.terminal_event is None):
        raise AssemblyError("gamma0 did not reach rho1 and rho2")

    points = np.vstack([upper.y[::-1], lower.y[1:]])
    return _fill(points, np.array([sq.w1L, slow.w20]), sq.s, slow.kappa0)


def _sigma(
    rho: float,
    w1: float,
    w2_start: float,
    s: float,
    kappa_start: float,
    kappa_rate: float,
    duration: float,
    n: int,
) -> np.ndarray:
    tau = np.linspace(0.0, duration, n)
    rows = np.empty((n, 6))
    rows[:, 0] = rho
    rows[:, 1] = 0.0
    rows[:, 2] = w1
    rows[:, 3] = w2_start - tau
    rows[:, 4] = s
    rows[:, 5] = kappa_start + kappa_rate * tau

    return rows


def build_configuration(
    sq: ShockQuantities, p: ModelParams, cfg: Optional[SingularConfig] = None
) -> SingularConfiguration:
    """Assemble gamma1, sigma1, gamma0, sigma2, gamma2 and check the junctions."""
    cfg = cfg or SingularConfig()
    slow = slow_quantities(sq, p)
    h3 = check_h3(sq, p, cfg)
    if not h3.verified:
        raise H3Error(
            f"Connecting orbits not found: gamma1 {h3.gamma1.status.value} "
            f"({h3.gamma1.message}), gamma2 {h3.gamma2.status.value} ({h3.gamma2.message})"
        )

    rd = _data(sq)

    # Limit points of the orbits close each piece
    gamma1_points = np.vstack(
        [[rd.uL.beta, 1.0 / rd.uL.v], h3.gamma1.points, [p.rho1, 0.0]]
    )
    gamma2_points = np.vstack(
        [[p.rho2, 0.0], h3.gamma2.points, [rd.uR.beta, 1.0 / rd.uR.v]]
    )

    gamma1 = _fill(gamma1_points, sq.wL, sq.s, 0.0)
    sigma1 = _sigma(
        p.rho1, sq.w1L, sq.w2L, sq.s, 0.0, b2(p.rho1, p), slow.tau10, cfg.n_slow
    )
    gamma0 = _gamma0(sq, p, slow, cfg)
    sigma2 = _sigma(
        p.rho2, sq.w1L, slow.w20, sq.s, slow.kappa0, b2(p.rho2, p), slow.tau20, cfg.n_slow
    )
    gamma2 = _fill(gamma2_points, sq.wR, sq.s, 0.0)

    config = SingularConfiguration(
        gamma1=gamma1,
        sigma1=sigma1,
        gamma0=gamma0,
        sigma2=sigma2,
        gamma2=gamma2,
        slow=slow,
        h3=h3,
    )

    names = list(config.pieces)
    pieces = list(config.pieces.values())
    for i in range(len(pieces) - 1):
        gap = float(np.max(np.abs(pieces[i][-1] - pieces[i + 1][0])))
        if gap > cfg.junction_tol:
            raise AssemblyError(f"Junction {names[i]} -> {names[i + 1]} mismatch {gap:.3e}")

    return config


def explore_h3(
    uL: State,
    p: ModelParams,
    n_beta: int = 10,
    n_v: int = 10,
    cfg: Optional[SingularConfig] = None,
) -> List[H3GridPoint]:
    """Check H3 numerically on every H1 point of a uR grid."""
    cfg = cfg or SingularConfig()
    beta_values = np.linspace(p.rho2, uL.beta, n_beta + 2)[1:-1]
    v_values = np.linspace(0.0, 2.0 * uL.v, n_v + 2)[1:-1]

    results: List[H3GridPoint] = []
    for beta_r in beta_values:
        for v_r in v_values:
            uR = State(float(beta_r), float(v_r))
            rd = RiemannData(uL=uL, uR=uR)
            point = H3GridPoint(uR=uR, h1=check_h1(rd, p))
            if point.h1:
                sq = shock_quantities(rd, p)
                try:
                    report = check_h3(sq, p, cfg)
                except DShockError as err:
                    _LOGGER.debug("H3 check failed at %s: %s", uR, err)
                else:
                    point.h3_structural = report.structural
                    point.h3_verified = report.verified

            results.append(point)

    n_h1 = sum(1 for r in results if r.h1)
    n_h3 = sum(1 for r in results if r.h3_verified)
    _LOGGER.info("H3 verified on %s of %s H1 points", n_h3, n_h1)

    return results

