"""Viscous profiles of the self-similar regularization by shooting.

The profile is an orbit of the fast-slow system (beta, v, w1, w2, xi) that
leaves the curve of equilibria U_L = {(uL, wL - a uL, s + a)} and lands on
U_R = {(uR, wR - a uR, s + a)}. Where v grows past v_switch the orbit is
continued in the chart (beta, r, w1, w2, xi, kappa) with r = 1/v and
kappa = eps log v, so the spike v ~ exp(kappa0 / eps) is never formed.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import least_squares, minimize

from .errors import (
    ConfigError,
    NoConvergenceError,
    NumericalError,
    SeedingError,
    SpikeTooSmallError,
    ValidationError,
    WindowError,
)
from .fields import VectorFieldId, collocation_defect, make_field
from .integrate import Event, IntegratorConfig, Termination, integrate
from .model import ModelParams, eigenvalues, jacobian
from .riemann import RiemannData, ShockQuantities, check_h1, shock_quantities
from .singular import slow_quantities
from .util import unit

_LOGGER = logging.getLogger("dshock.profile")

# v = exp(kappa / eps) is not formed above this exponent
_MAX_LOG_V = 25.0

_MAX_SEGMENTS = 64
_FAILURE_PENALTY = 10.0
_PROFILE_COLUMNS = ("xi", "beta", "v", "r", "kappa", "w1", "w2", "x2", "chart", "zeta")


class Chart(IntEnum):
    BV = 0
    """(beta, v, w1, w2, xi)"""

    BRK = 1
    """(beta, r, w1, w2, xi, kappa)"""


@dataclass
class ShootingConfig:
    """Settings for shoot() and sweep()."""

    eps: float = 0.1
    eps_list: Tuple[float, ...] = (0.1, 0.05, 0.02, 0.01)

    delta_seed: float = 1e-4
    """Distance of the seed from U_L."""

    v_switch: float = 5.0
    """Continue in the (r, kappa) chart above this v."""

    r0: float = 0.1
    """Section r = r0 that bounds the spike."""

    profile_tol: float = 1e-6
    """Success threshold on the landing residual."""

    xi_end: Optional[float] = None
    """End of the window; chosen from the contraction rate into U_R when unset."""

    xi_end_min_offset: float = 0.3
    window_margin: float = 3.0
    """Extra e-folds of contraction beyond profile_tol when sizing xi_end."""

    growth_scale: float = 1.0
    """Amplitude the departure from U_L should reach at xi = s."""

    alpha: Optional[float] = None
    theta: Optional[float] = None
    """Start values for the search; alpha defaults to the growth estimate."""

    n_theta: int = 24
    alpha_factors: Tuple[float, ...] = (1.0,)
    """Multiples of the start alpha used in the coarse scan."""

    max_iter: int = 400
    n_restarts: int = 1
    polish: bool = True

    escape_margin: float = 0.25
    """Orbits with beta farther than this (times rho1 - rho2) outside the strip are dropped."""

    max_chart_time: float = 1e6

    integrator: IntegratorConfig = field(
        default_factory=lambda: IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    )

    def __post_init__(self):
        if not self.delta_seed > 0:
            raise ConfigError("shooting.delta_seed", "must be positive")

        if not self.r0 > 0:
            raise ConfigError("shooting.r0", "must be positive")

        if not self.profile_tol > 0:
            raise ConfigError("shooting.profile_tol", "must be positive")

        if self.n_theta < 1:
            raise ConfigError("shooting.n_theta", "must be at least 1")


@dataclass
class ShootingParams:
    """Seed of one shot."""

    alpha: float
    """Offset along U_L: the seed sits at xi = s + alpha, w = wL - alpha uL."""

    theta: float
    """Angle in the unstable plane of Df(uL) - xi I."""

    delta_seed: float = 1e-4

    xi_end: float = math.inf
    """End of the integration window."""

    v_switch: float = 5.0

    def xi_start(self, s: float) -> float:
        """Start of the window (the seed)."""
        return s + self.alpha

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "theta": self.theta,
            "delta_seed": self.delta_seed,
            "xi_end": self.xi_end,
            "v_switch": self.v_switch,
        }


@dataclass
class PhasePoint:
    """Point of the fast-slow phase space."""

    beta: float
    v: float
    w1: float
    w2: float
    xi: float

    def as_array(self) -> np.ndarray:
        return np.array([self.beta, self.v, self.w1, self.w2, self.xi])

    def to_chart(self, eps: float) -> np.ndarray:
        """(beta, r, w1, w2, xi, kappa); needs v > 0."""
        return np.array(
            [self.beta, 1.0 / self.v, self.w1, self.w2, self.xi, eps * math.log(self.v)]
        )


@dataclass
class ProfileResult:
    """A computed viscous profile and its diagnostics."""

    eps: float
    s: float
    xi: np.ndarray
    beta: np.ndarray
    v: np.ndarray
    """NaN where kappa / eps is too large to exponentiate."""

    r: np.ndarray
    kappa: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    chart: np.ndarray
    zeta: np.ndarray
    """Clock of the (r, kappa) chart; v dxi = eps dzeta."""

    params: ShootingParams
    residual: float
    residual_vector: np.ndarray
    max_eps_log_v: float
    r0: float
    r0_crossings: List[Tuple[float, float]] = field(default_factory=list)
    """(xi, zeta) where r crosses r0, in order."""

    success: bool = False

    @property
    def x2(self) -> np.ndarray:
        """x2 = w2 + (xi - s) v"""
        return self.w2 + (self.xi - self.s) * self.v

    @property
    def xi_in(self) -> Optional[float]:
        return self.r0_crossings[0][0] if self.r0_crossings else None

    @property
    def xi_out(self) -> Optional[float]:
        return self.r0_crossings[-1][0] if self.r0_crossings else None

    def log_v(self) -> np.ndarray:
        return self.kappa / self.eps

    def columns(self) -> Dict[str, np.ndarray]:
        return {
            "xi": self.xi,
            "beta": self.beta,
            "v": self.v,
            "r": self.r,
            "kappa": self.kappa,
            "w1": self.w1,
            "w2": self.w2,
            "x2": self.x2,
            "chart": self.chart.astype(float),
            "zeta": self.zeta,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "s": self.s,
            "params": self.params.to_dict(),
            "residual": self.residual,
            "residual_vector": list(self.residual_vector),
            "max_eps_log_v": self.max_eps_log_v,
            "r0": self.r0,
            "r0_crossings": [list(c) for c in self.r0_crossings],
            "xi_in": self.xi_in,
            "xi_out": self.xi_out,
            "success": self.success,
            "samples": {name: list(values) for name, values in self.columns().items()},
        }

    @staticmethod
    def from_dict(profile_dict: Dict[str, Any]) -> "ProfileResult":
        samples = profile_dict["samples"]

        def _column(name: str) -> np.ndarray:
            return np.array(
                [math.nan if x is None else x for x in samples[name]], dtype=float
            )

        def _number(value: Any) -> float:
            return math.nan if value is None else float(value)

        params = {key: _number(value) for key, value in profile_dict["params"].items()}
        if math.isnan(params.get("xi_end", math.inf)):
            params["xi_end"] = math.inf

        return ProfileResult(
            eps=float(profile_dict["eps"]),
            s=float(profile_dict["s"]),
            xi=_column("xi"),
            beta=_column("beta"),
            v=_column("v"),
            r=_column("r"),
            kappa=_column("kappa"),
            w1=_column("w1"),
            w2=_column("w2"),
            chart=_column("chart").astype(int),
            zeta=_column("zeta"),
            params=ShootingParams(**params),
            residual=_number(profile_dict["residual"]),
            residual_vector=np.array(
                [_number(x) for x in profile_dict["residual_vector"]], dtype=float
            ),
            max_eps_log_v=_number(profile_dict["max_eps_log_v"]),
            r0=float(profile_dict["r0"]),
            r0_crossings=[
                (float(xi), float(zeta)) for xi, zeta in profile_dict["r0_crossings"]
            ],
            success=bool(profile_dict["success"]),
        )

    @staticmethod
    def from_csv(
        csv_path: Union[str, Path], eps: float, s: float, r0: float = 0.1
    ) -> "ProfileResult":
        """Load profile samples written with the columns of columns().

        Crossings of r0 are recomputed from the samples.
        """
        frame = pd.read_csv(csv_path)
        missing = [c for c in _PROFILE_COLUMNS if c not in frame.columns]
        if missing:
            raise ValidationError(f"Profile CSV {csv_path} lacks columns {missing}")

        kappa = frame["kappa"].to_numpy(dtype=float)
        result = ProfileResult(
            eps=eps,
            s=s,
            xi=frame["xi"].to_numpy(dtype=float),
            beta=frame["beta"].to_numpy(dtype=float),
            v=frame["v"].to_numpy(dtype=float),
            r=frame["r"].to_numpy(dtype=float),
            kappa=kappa,
            w1=frame["w1"].to_numpy(dtype=float),
            w2=frame["w2"].to_numpy(dtype=float),
            chart=frame["chart"].to_numpy(dtype=float).astype(int),
            zeta=frame["zeta"].to_numpy(dtype=float),
            params=ShootingParams(alpha=math.nan, theta=math.nan),
            residual=math.nan,
            residual_vector=np.full(4, math.nan),
            max_eps_log_v=float(np.nanmax(kappa)),
            r0=r0,
            success=True,
        )
        result.r0_crossings = sample_crossings(result, r0)

        return result


class _Outcome(IntEnum):
    LANDED = 0
    ESCAPED = 1
    FAILED = 2


@dataclass
class _Track:
    """Raw output of one shot."""

    outcome: _Outcome
    chart: Chart
    final: np.ndarray
    xi_reached: float
    samples: Dict[str, List[np.ndarray]]
    r0_crossings: List[Tuple[float, float]]
    peaks: List[float]
    message: str = ""


@dataclass
class SweepMember:
    eps: float
    result: Optional[ProfileResult] = None
    error: Optional[str] = None

    @property
    def success(self) -> bool:
        return (self.result is not None) and self.result.success


@dataclass
class SweepResult:
    """Profiles over decreasing eps with the eps -> 0 extrapolation of max eps log v."""

    members: List[SweepMember]
    limit: Optional[float]
    slope: Optional[float]
    candidates: Dict[str, float]
    relative_errors: Dict[str, float]

    @property
    def within_10pct(self) -> Dict[str, bool]:
        return {name: err <= 0.1 for name, err in self.relative_errors.items()}

    @property
    def closest(self) -> Optional[str]:
        if not self.relative_errors:
            return None

        return min(self.relative_errors, key=lambda name: self.relative_errors[name])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "members": [
                {
                    "eps": m.eps,
                    "success": m.success,
                    "error": m.error,
                    "max_eps_log_v": m.result.max_eps_log_v if m.result else None,
                    "residual": m.result.residual if m.result else None,
                    "xi_in": m.result.xi_in if m.result else None,
                    "xi_out": m.result.xi_out if m.result else None,
                }
                for m in self.members
            ],
            "limit": self.limit,
            "slope": self.slope,
            "candidates": self.candidates,
            "relative_errors": self.relative_errors,
            "within_10pct": self.within_10pct,
            "closest": self.closest,
        }


# -----------------------------------------------------------------------------


def _data(sq: ShockQuantities) -> RiemannData:
    if sq.data is None:
        raise ValidationError("Shock quantities carry no Riemann data")

    return sq.data


def unstable_plane(
    sq: ShockQuantities, p: ModelParams, xi_seed: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the unstable plane of Df(uL) - xi_seed I."""
    uL = _data(sq).uL
    matrix = jacobian(uL, p) - xi_seed * np.eye(2)
    values, vectors = np.linalg.eig(matrix)
    if not np.all(np.real(values) > 0):
        raise SeedingError(
            f"Unstable plane at xi={xi_seed} is not 2-dimensional (eigenvalues {values})"
        )

    if abs(np.imag(values[0])) > 1e-14:
        first = np.real(vectors[:, 0])
        second = np.imag(vectors[:, 0])
    else:
        first = np.real(vectors[:, 0])
        second = np.real(vectors[:, 1])

    e1 = unit(first)
    e2 = unit(second - np.dot(second, e1) * e1)

    return e1, e2


def seed_point(sp: ShootingParams, sq: ShockQuantities, p: ModelParams) -> PhasePoint:
    """Point at distance delta_seed from U_L in its unstable fiber at xi = s + alpha."""
    uL = _data(sq).uL
    xi_seed = sq.s + sp.alpha
    e1, e2 = unstable_plane(sq, p, xi_seed)
    offset = sp.delta_seed * (math.cos(sp.theta) * e1 + math.sin(sp.theta) * e2)

    return PhasePoint(
        beta=uL.beta + offset[0],
        v=uL.v + offset[1],
        w1=sq.w1L - sp.alpha * uL.beta,
        w2=sq.w2L - sp.alpha * uL.v,
        xi=xi_seed,
    )


def default_alpha(sq: ShockQuantities, p: ModelParams, eps: float, cfg: ShootingConfig) -> float:
    """Seed offset at which linear growth out of U_L reaches growth_scale at xi = s."""
    gap = eigenvalues(_data(sq).uL, p).real_part - sq.s
    log_gain = math.log(cfg.growth_scale / cfg.delta_seed)

    return gap - math.sqrt(gap * gap + 2.0 * eps * log_gain)


def default_xi_end(sq: ShockQuantities, p: ModelParams, eps: float, cfg: ShootingConfig) -> float:
    """End of window where contraction into U_R has passed profile_tol."""
    if cfg.xi_end is not None:
        return cfg.xi_end

    real_right = eigenvalues(_data(sq).uR, p).real_part
    e_folds = math.log(1.0 / cfg.profile_tol) + cfg.window_margin
    xi_end = real_right + math.sqrt((sq.s - real_right) ** 2 + 2.0 * eps * e_folds)

    return max(sq.s + cfg.xi_end_min_offset, xi_end)


# -----------------------------------------------------------------------------


def _bv_events(p: ModelParams, sp: ShootingParams, r0: float, margin: float) -> List[Event]:
    rho1, rho2 = p.rho1, p.rho2
    rho_prod = rho1 * rho2

    def _v_rate(t: float, y: np.ndarray) -> float:
        beta, v, _w1, w2, xi = y
        return v * v * (beta * beta - rho_prod) / (2 * beta * beta) - xi * v - w2

    return [
        Event("switch", lambda t, y: y[1] - sp.v_switch, terminal=True, direction=1),
        Event("escape", lambda t, y: y[0] - (rho1 + margin), terminal=True, direction=1),
        Event("escape", lambda t, y: (rho2 - margin) - y[0], terminal=True, direction=1),
        Event("escape", lambda t, y: -y[1] - sp.v_switch, terminal=True, direction=1),
        Event("r0", lambda t, y: y[1] - 1.0 / r0),
        Event("peak", _v_rate, direction=-1),
    ]


def _brk_events(p: ModelParams, sp: ShootingParams, r0: float, margin: float) -> List[Event]:
    rho1, rho2 = p.rho1, p.rho2
    rho_prod = rho1 * rho2

    def _kappa_rate(t: float, y: np.ndarray) -> float:
        beta, r, _w1, w2, xi, _kappa = y
        return (beta * beta - rho_prod) / (2 * beta * beta) - xi * r - w2 * r * r

    return [
        Event("xi_end", lambda t, y: y[4] - sp.xi_end, terminal=True, direction=1),
        Event("switch", lambda t, y: y[1] - 1.0 / sp.v_switch, terminal=True, direction=1),
        Event("escape", lambda t, y: y[0] - (rho1 + margin), terminal=True, direction=1),
        Event("escape", lambda t, y: (rho2 - margin) - y[0], terminal=True, direction=1),
        Event("r0", lambda t, y: y[1] - r0),
        Event("peak", _kappa_rate, direction=-1),
    ]


def _new_samples() -> Dict[str, List[np.ndarray]]:
    return {name: [] for name in ("xi", "beta", "v", "r", "kappa", "w1", "w2", "chart", "zeta")}


def _track(
    sp: ShootingParams,
    sq: ShockQuantities,
    p: ModelParams,
    eps: float,
    cfg: ShootingConfig,
) -> _Track:
    """Integrate one shot from its seed to xi_end, switching charts as needed."""
    seed = seed_point(sp, sq, p)
    margin = cfg.escape_margin * (p.rho1 - p.rho2)
    sf_bv = make_field(VectorFieldId.SF_BV, p, eps=eps)
    sf_brk = make_field(VectorFieldId.SF_BRK, p, eps=eps)
    bv_events = _bv_events(p, sp, cfg.r0, margin)
    brk_events = _brk_events(p, sp, cfg.r0, margin)

    samples = _new_samples()
    crossings: List[Tuple[float, float]] = []
    peaks: List[float] = []

    chart = Chart.BV
    y = seed.as_array()
    zeta_offset = 0.0
    first_segment = True

    for _ in range(_MAX_SEGMENTS):
        skip = 0 if first_segment else 1
        first_segment = False
        try:
            if chart == Chart.BV:
                t_end = (sp.xi_end - y[4]) / eps
                if t_end <= 0:
                    return _Track(_Outcome.LANDED, chart, y, y[4], samples, crossings, peaks)

                traj = integrate(sf_bv, y, (0.0, t_end), cfg.integrator, bv_events)
            else:
                traj = integrate(sf_brk, y, (0.0, cfg.max_chart_time), cfg.integrator, brk_events)
        except NumericalError as err:
            return _Track(
                _Outcome.FAILED, chart, y, float(y[4]), samples, crossings, peaks, str(err)
            )

        t, ys = traj.t[skip:], traj.y[skip:]
        if chart == Chart.BV:
            beta, v, w1, w2, xi = ys.T
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.where(v != 0, 1.0 / v, np.nan)
                kappa = np.where(v > 0, eps * np.log(np.abs(v)), np.nan)

            # zeta' = v in fast time
            all_v = traj.y[:, 1]
            zeta_all = zeta_offset + np.concatenate(
                [[0.0], np.cumsum(0.5 * (all_v[1:] + all_v[:-1]) * np.diff(traj.t))]
            )
            zeta = zeta_all[skip:]
            zeta_at = lambda t_event: float(np.interp(t_event, traj.t, zeta_all))  # noqa: E731
            for event in traj.events:
                if event.name == "r0":
                    crossings.append((float(event.y[4]), zeta_at(event.t)))
                elif event.name == "peak" and event.y[1] > 0:
                    peaks.append(eps * math.log(event.y[1]))

            zeta_offset = float(zeta_all[-1])
        else:
            beta, r, w1, w2, xi, kappa = ys.T
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                v = np.where(kappa / eps > _MAX_LOG_V, np.nan, 1.0 / r)

            zeta = zeta_offset + t
            for event in traj.events:
                if event.name == "r0":
                    crossings.append((float(event.y[4]), zeta_offset + event.t))
                elif event.name == "peak":
                    peaks.append(float(event.y[5]))

            zeta_offset += traj.final_t

        samples["xi"].append(xi)
        samples["beta"].append(beta)
        samples["v"].append(v)
        samples["r"].append(r)
        samples["kappa"].append(kappa)
        samples["w1"].append(w1)
        samples["w2"].append(w2)
        samples["chart"].append(np.full(len(xi), int(chart)))
        samples["zeta"].append(zeta)

        final = traj.final_y
        end = traj.terminal_event
        if end is not None and end.name == "switch":
            if chart == Chart.BV:
                chart = Chart.BRK
                y = np.array(
                    [final[0], 1.0 / final[1], final[2], final[3], final[4], eps * math.log(final[1])]
                )
            else:
                chart = Chart.BV
                y = np.array([final[0], 1.0 / final[1], final[2], final[3], final[4]])

            _LOGGER.debug("Chart switch to %s at xi=%s", chart.name, y[4])
            continue

        if end is not None and end.name == "escape":
            return _Track(
                _Outcome.ESCAPED, chart, final, float(final[4]), samples, crossings, peaks, "escaped"
            )

        if (end is not None and end.name == "xi_end") or (
            traj.termination == Termination.TIME_REACHED and chart == Chart.BV
        ):
            return _Track(_Outcome.LANDED, chart, final, float(final[4]), samples, crossings, peaks)

        return _Track(
            _Outcome.FAILED,
            chart,
            final,
            float(final[4]),
            samples,
            crossings,
            peaks,
            traj.termination.value,
        )

    return _Track(_Outcome.FAILED, chart, y, float(y[4]), samples, crossings, peaks, "chart chatter")


def _landing_residual(
    track: _Track, sq: ShockQuantities, sp: ShootingParams
) -> np.ndarray:
    """(u - uR, w - (wR - (xi_end - s) uR)), or a penalty when the shot failed."""
    if (track.outcome != _Outcome.LANDED) or (track.chart != Chart.BV):
        # Earlier failures score worse
        penalty = _FAILURE_PENALTY + max(0.0, sp.xi_end - track.xi_reached)
        return np.full(4, penalty / 2.0)

    uR = _data(sq).uR
    beta, v, w1, w2, xi = track.final
    offset = xi - sq.s

    return np.array(
        [
            beta - uR.beta,
            v - uR.v,
            w1 - (sq.w1R - offset * uR.beta),
            w2 - (sq.w2R - offset * uR.v),
        ]
    )


def _assemble(
    track: _Track,
    sq: ShockQuantities,
    sp: ShootingParams,
    eps: float,
    cfg: ShootingConfig,
    residual_vector: np.ndarray,
) -> ProfileResult:
    columns = {
        name: (np.concatenate(chunks) if chunks else np.array([]))
        for name, chunks in track.samples.items()
    }
    kappa = columns["kappa"]
    finite_kappa = kappa[np.isfinite(kappa)]
    candidates = list(finite_kappa) + track.peaks
    max_eps_log_v = max(candidates) if candidates else math.nan
    residual = float(np.linalg.norm(residual_vector))

    return ProfileResult(
        eps=eps,
        s=sq.s,
        xi=columns["xi"],
        beta=columns["beta"],
        v=columns["v"],
        r=columns["r"],
        kappa=kappa,
        w1=columns["w1"],
        w2=columns["w2"],
        chart=columns["chart"].astype(int),
        zeta=columns["zeta"],
        params=sp,
        residual=residual,
        residual_vector=residual_vector,
        max_eps_log_v=float(max_eps_log_v),
        r0=cfg.r0,
        r0_crossings=list(track.r0_crossings),
        success=(track.outcome == _Outcome.LANDED) and (residual < cfg.profile_tol),
    )


def evaluate(
    sp: ShootingParams, sq: ShockQuantities, p: ModelParams, eps: float, cfg: ShootingConfig
) -> ProfileResult:
    """Integrate a single shot without searching."""
    track = _track(sp, sq, p, eps, cfg)
    if track.outcome == _Outcome.FAILED and track.message.startswith(Termination.BLOW_UP.value):
        raise WindowError(f"Orbit blew up before xi_end={sp.xi_end}")

    return _assemble(track, sq, sp, eps, cfg, _landing_residual(track, sq, sp))


def shoot(
    rd: RiemannData,
    p: ModelParams,
    eps: float,
    sp_init: Optional[ShootingParams] = None,
    cfg: Optional[ShootingConfig] = None,
) -> ProfileResult:
    """Find (alpha, theta) whose orbit lands on U_R at xi_end."""
    cfg = cfg or ShootingConfig()
    if not 0 < eps <= 0.5:
        raise ValidationError(f"eps must be in (0, 0.5], got {eps}")

    if not check_h1(rd, p):
        raise ValidationError("Riemann data are not over-compressive (H1 fails)")

    if not cfg.v_switch > max(abs(rd.uL.v), abs(rd.uR.v)):
        raise ConfigError("shooting.v_switch", "must exceed |vL| and |vR|")

    sq = shock_quantities(rd, p)
    xi_end = default_xi_end(sq, p, eps, cfg)

    def _params(x: Sequence[float]) -> ShootingParams:
        return ShootingParams(
            alpha=float(x[0]),
            theta=float(x[1]),
            delta_seed=cfg.delta_seed,
            xi_end=xi_end,
            v_switch=cfg.v_switch,
        )

    def _residual_vector(x: Sequence[float]) -> np.ndarray:
        sp = _params(x)
        if sq.s + sp.alpha >= sp.xi_end:
            return np.full(4, _FAILURE_PENALTY)

        try:
            return _landing_residual(_track(sp, sq, p, eps, cfg), sq, sp)
        except SeedingError:
            return np.full(4, _FAILURE_PENALTY)

    def _objective(x: Sequence[float]) -> float:
        return float(np.linalg.norm(_residual_vector(x)))

    # Coarse scan
    if sp_init is not None:
        starts = [np.array([sp_init.alpha, sp_init.theta])]
    else:
        alpha0 = cfg.alpha if cfg.alpha is not None else default_alpha(sq, p, eps, cfg)
        if cfg.theta is not None:
            thetas = [cfg.theta]
        else:
            thetas = list(np.linspace(0.0, 2 * math.pi, cfg.n_theta, endpoint=False))

        starts = [
            np.array([alpha0 * factor, theta])
            for factor in cfg.alpha_factors
            for theta in thetas
        ]

    scores = [(_objective(x), i) for i, x in enumerate(starts)]
    best_score, best_index = min(scores)
    best_x = starts[best_index]
    _LOGGER.debug("Scan best %.3e at %s", best_score, best_x)

    # Nelder-Mead with restarts
    alpha_step = max(0.05 * abs(best_x[0]), 1e-3)
    theta_step = 2 * math.pi / max(cfg.n_theta, 4)
    for attempt in range(1 + cfg.n_restarts):
        simplex = np.array(
            [best_x, best_x + [alpha_step, 0.0], best_x + [0.0, theta_step]]
        )
        opt = minimize(
            _objective,
            best_x,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "maxiter": cfg.max_iter,
                "xatol": 1e-12,
                "fatol": 0.01 * cfg.profile_tol,
            },
        )
        if opt.fun < best_score:
            best_score, best_x = float(opt.fun), np.asarray(opt.x)

        _LOGGER.debug("Nelder-Mead pass %s: %.3e at %s", attempt, best_score, best_x)
        alpha_step *= 0.1
        theta_step *= 0.1

    if cfg.polish and best_score < _FAILURE_PENALTY:
        try:
            fit = least_squares(
                _residual_vector, best_x, method="lm", xtol=1e-15, ftol=1e-15, diff_step=1e-8
            )
        except (ValueError, NumericalError) as err:
            _LOGGER.debug("Polish failed: %s", err)
        else:
            polished = float(np.linalg.norm(fit.fun))
            if polished < best_score:
                best_score, best_x = polished, np.asarray(fit.x)

    sp = _params(best_x)
    result = evaluate(sp, sq, p, eps, cfg)
    _LOGGER.debug(
        "eps=%s: residual %.3e, max eps log v %.6f", eps, result.residual, result.max_eps_log_v
    )

    if not result.success:
        _LOGGER.warning("Shooting at eps=%s stopped at residual %.3e", eps, result.residual)
        raise NoConvergenceError(
            f"Shooting at eps={eps} did not reach {cfg.profile_tol}",
            result.residual,
            (sp.alpha, sp.theta),
        )

    return result


def sweep(
    rd: RiemannData,
    p: ModelParams,
    eps_list: Optional[Sequence[float]] = None,
    cfg: Optional[ShootingConfig] = None,
) -> SweepResult:
    """Shoot for each eps (warm-started) and extrapolate max eps log v to eps = 0."""
    cfg = cfg or ShootingConfig()
    eps_values = [float(e) for e in (eps_list if eps_list is not None else cfg.eps_list)]
    if len(eps_values) < 3:
        raise ConfigError("shooting.eps_list", "needs at least 3 values")

    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise ConfigError("shooting.eps_list", "must be strictly decreasing")

    sq = shock_quantities(rd, p)
    slow = slow_quantities(sq, p)
    candidates = {"kappa0": slow.kappa0, "printed": slow.printed["v_max_limit"]}

    members: List[SweepMember] = []
    previous: Optional[Tuple[float, ShootingParams]] = None
    for eps in eps_values:
        sp_init = None
        if previous is not None:
            prev_eps, prev_sp = previous
            shift = prev_sp.alpha - default_alpha(sq, p, prev_eps, cfg)
            sp_init = replace(
                prev_sp, alpha=default_alpha(sq, p, eps, cfg) + shift
            )

        try:
            result = shoot(rd, p, eps, sp_init=sp_init, cfg=cfg)
        except NoConvergenceError as err:
            if sp_init is not None:
                # Warm start failed; fall back to a full scan
                try:
                    result = shoot(rd, p, eps, cfg=cfg)
                except NumericalError as retry_err:
                    members.append(SweepMember(eps=eps, error=str(retry_err)))
                    continue
            else:
                members.append(SweepMember(eps=eps, error=str(err)))
                continue
        except NumericalError as err:
            members.append(SweepMember(eps=eps, error=str(err)))
            continue

        members.append(SweepMember(eps=eps, result=result))
        previous = (eps, result.params)

    good = [m for m in members if m.success]
    limit: Optional[float] = None
    slope: Optional[float] = None
    relative_errors: Dict[str, float] = {}
    if len(good) >= 2:
        eps_good = np.array([m.eps for m in good])
        values = np.array([m.result.max_eps_log_v for m in good])  # type: ignore[union-attr]
        slope_fit, intercept = np.polyfit(eps_good, values, 1)
        limit, slope = float(intercept), float(slope_fit)
        relative_errors = {
            name: abs(limit - value) / abs(value) for name, value in candidates.items()
        }
        _LOGGER.info("Extrapolated max eps log v: %.6f", limit)

    return SweepResult(
        members=members,
        limit=limit,
        slope=slope,
        candidates=candidates,
        relative_errors=relative_errors,
    )


# -----------------------------------------------------------------------------


def sample_crossings(pr: ProfileResult, r0: float) -> List[Tuple[float, float]]:
    """Crossings of r = r0 interpolated between samples."""
    gap = pr.r - r0
    found: List[Tuple[float, float]] = []
    for i in range(len(gap) - 1):
        g0, g1 = gap[i], gap[i + 1]
        if not (np.isfinite(g0) and np.isfinite(g1)):
            continue

        if (g0 < 0) != (g1 < 0):
            frac = g0 / (g0 - g1)
            xi = pr.xi[i] + frac * (pr.xi[i + 1] - pr.xi[i])
            zeta = pr.zeta[i] + frac * (pr.zeta[i + 1] - pr.zeta[i])
            found.append((float(xi), float(zeta)))

    return found


def crossings(pr: ProfileResult, r0: Optional[float] = None) -> Tuple[float, float]:
    """(xi_in, xi_out): first and last xi where r crosses r0."""
    if (r0 is None) or (r0 == pr.r0):
        found = pr.r0_crossings
        r0 = pr.r0
    else:
        found = sample_crossings(pr, r0)

    if not found:
        raise SpikeTooSmallError(f"Profile never reaches v = {1.0 / r0:g}")

    return found[0][0], found[-1][0]


def x2_concentration(pr: ProfileResult, p: ModelParams, width: float = 0.1) -> float:
    """Share of the total variation of x2 where beta is within width of rho1 or rho2."""
    x2 = pr.x2
    dx2 = np.abs(np.diff(x2))
    beta_mid = 0.5 * (pr.beta[1:] + pr.beta[:-1])
    usable = np.isfinite(dx2)
    near = (np.abs(beta_mid - p.rho1) <= width) | (np.abs(beta_mid - p.rho2) <= width)

    total = float(np.sum(dx2[usable]))
    if total == 0:
        return 0.0

    return float(np.sum(dx2[usable & near]) / total)


def ode_residual(pr: ProfileResult, p: ModelParams) -> np.ndarray:
    """Collocation defect of the fast-slow system between consecutive samples.

    Samples in the (beta, v) chart are checked against SF_BV in fast time
    t = xi / eps, samples in the (r, kappa) chart against SF_BRK in zeta.
    Entry i belongs to the interval between samples i and i + 1; intervals
    that change chart or have zero length are nan.
    """
    residual = np.full(max(len(pr.xi) - 1, 0), np.nan)
    if len(pr.xi) < 2:
        return residual

    fields = {
        Chart.BV: make_field(VectorFieldId.SF_BV, p, eps=pr.eps),
        Chart.BRK: make_field(VectorFieldId.SF_BRK, p, eps=pr.eps),
    }

    # Runs of consecutive samples in one chart
    breaks = np.flatnonzero(np.diff(pr.chart) != 0) + 1
    for start, stop in zip(np.r_[0, breaks], np.r_[breaks, len(pr.xi)]):
        if stop - start < 2:
            continue

        chart = Chart(int(pr.chart[start]))
        part = slice(start, stop)
        if chart == Chart.BV:
            t = pr.xi[part] / pr.eps
            y = np.column_stack([pr.beta, pr.v, pr.w1, pr.w2, pr.xi])[part]
        else:
            t = pr.zeta[part]
            y = np.column_stack([pr.beta, pr.r, pr.w1, pr.w2, pr.xi, pr.kappa])[part]

        residual[start : stop - 1] = collocation_defect(fields[chart], t, y)

    return residual
