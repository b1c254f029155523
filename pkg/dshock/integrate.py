"""Adaptive Dormand-Prince 5(4) integration with event location."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigError, DimensionError, StiffnessError
from .fields import RightHandSide, VectorField

_LOGGER = logging.getLogger("dshock.integrate")

# Dormand-Prince tableau
_C = np.array([0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1.0 / 5.0]),
    np.array([3.0 / 40.0, 9.0 / 40.0]),
    np.array([44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0]),
    np.array([19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0]),
    np.array(
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
        ]
    ),
    np.array(
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0]
    ),
]
_B5 = np.array(
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0]
)
_B4 = np.array(
    [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ]
)
_E = _B5 - _B4

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0


@dataclass
class IntegratorConfig:
    """Tolerances and limits for integrate()."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12

    max_step: float = math.inf
    """Largest allowed |h|."""

    max_steps: int = 200_000
    """Accepted plus rejected steps before giving up."""

    event_tol: float = 1e-12
    """Width of the final bisection bracket for events."""

    blow_up: float = 1e12
    """Terminate when max |y| exceeds this."""

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "event_tol", "blow_up"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"integrator.{name}", f"must be positive, got {value}")

        if self.max_steps < 1:
            raise ConfigError("integrator.max_steps", "must be at least 1")


@dataclass
class Event:
    """Scalar function whose zeros are located during integration."""

    name: str
    fn: Callable[[float, np.ndarray], float]

    terminal: bool = False
    """Stop integrating at the first zero."""

    direction: int = 0
    """+1 for -/+ crossings, -1 for +/- crossings (in integration order), 0 for both."""


@dataclass
class EventRecord:
    name: str
    t: float
    y: np.ndarray


class Termination(str, Enum):
    TIME_REACHED = "time_reached"
    EVENT = "event"
    STEP_CAP = "step_cap"
    BLOW_UP = "blow_up"


@dataclass
class Trajectory:
    """Accepted samples of an integration."""

    t: np.ndarray
    y: np.ndarray
    """Shape (n_samples, dim)."""

    termination: Termination
    events: List[EventRecord] = field(default_factory=list)
    n_steps: int = 0

    @property
    def final_t(self) -> float:
        return float(self.t[-1])

    @property
    def final_y(self) -> np.ndarray:
        return self.y[-1]

    @property
    def terminal_event(self) -> Optional[EventRecord]:
        if (self.termination == Termination.EVENT) and self.events:
            return self.events[-1]

        return None

    def events_named(self, name: str) -> List[EventRecord]:
        return [e for e in self.events if e.name == name]

    def reversed(self) -> "Trajectory":
        """Same samples in the opposite order (e.g. backward runs read forward)."""
        return Trajectory(
            t=self.t[::-1].copy(),
            y=self.y[::-1].copy(),
            termination=self.termination,
            events=list(self.events),
            n_steps=self.n_steps,
        )


# -----------------------------------------------------------------------------


def _dp_step(
    rhs: RightHandSide, t: float, y: np.ndarray, f0: np.ndarray, h: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One Dormand-Prince step. Returns (y_new, f_new, error estimate)."""
    k = [f0]
    for i in range(1, 7):
        y_stage = y + h * np.dot(_A[i], k[:i])
        k.append(np.asarray(rhs(t + _C[i] * h, y_stage), dtype=float))

    # Stage 7 is evaluated at y_new (first-same-as-last)
    y_new = y + h * np.dot(_A[6], k[:6])
    k_arr = np.array(k)
    error = h * np.dot(_E, k_arr)

    return y_new, k[6], error


def _initial_step(
    rhs: RightHandSide, t0: float, y0: np.ndarray, f0: np.ndarray, direction: float, cfg: IntegratorConfig
) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(y0)
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    if (d0 < 1e-5) or (d1 < 1e-5):
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1

    y1 = y0 + direction * h0 * f0
    f1 = np.asarray(rhs(t0 + direction * h0, y1), dtype=float)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 5.0)

    return min(100 * h0, h1, cfg.max_step)


def _locate(
    rhs: RightHandSide,
    event: Event,
    t: float,
    y: np.ndarray,
    f: np.ndarray,
    h: float,
    g_start: float,
    cfg: IntegratorConfig,
) -> Tuple[float, np.ndarray]:
    """Bisect on step restarts from (t, y) for the zero of event.fn in (t, t+h)."""
    lo, hi = 0.0, h
    g_lo = g_start
    y_best = y
    t_best = t
    g_best = math.inf
    for _ in range(200):
        if abs(hi - lo) <= cfg.event_tol:
            break

        mid = 0.5 * (lo + hi)
        y_mid = _dp_step(rhs, t, y, f, mid)[0]
        g_mid = float(event.fn(t + mid, y_mid))
        if abs(g_mid) < g_best:
            g_best, t_best, y_best = abs(g_mid), t + mid, y_mid

        if g_mid == 0.0:
            break

        if (g_lo < 0) == (g_mid < 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid

    if g_best == math.inf:
        y_best = _dp_step(rhs, t, y, f, hi)[0]
        t_best = t + hi

    return t_best, y_best


def _crossed(event: Event, g_old: float, g_new: float) -> bool:
    if g_old == 0.0:
        return False

    if not ((g_old < 0 < g_new) or (g_old > 0 > g_new) or (g_new == 0.0)):
        return False

    if event.direction > 0:
        return g_old < 0

    if event.direction < 0:
        return g_old > 0

    return True


def integrate(
    field_or_rhs: Union[VectorField, RightHandSide],
    y0: Sequence[float],
    t_span: Tuple[float, float],
    cfg: Optional[IntegratorConfig] = None,
    events: Sequence[Event] = (),
    first_step: Optional[float] = None,
) -> Trajectory:
    """Integrate y' = rhs(t, y) over t_span (forward or backward).

    Terminates at the end of t_span, at the first terminal event, when
    |y| exceeds the blow-up bound, or when the step cap is reached.
    """
    if cfg is None:
        cfg = IntegratorConfig()

    y = np.array(y0, dtype=float)
    if isinstance(field_or_rhs, VectorField):
        if y.shape != (field_or_rhs.dim,):
            raise DimensionError(
                f"{field_or_rhs.id.value} has dimension {field_or_rhs.dim}, "
                f"got state of shape {y.shape}"
            )

    rhs = field_or_rhs
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t0 == t1:
        raise DimensionError(f"Degenerate time span: {t_span}")

    direction = 1.0 if t1 > t0 else -1.0
    t = t0
    f = np.asarray(rhs(t, y), dtype=float)
    if f.shape != y.shape:
        raise DimensionError(f"Vector field returned shape {f.shape} for state {y.shape}")

    h = first_step if first_step is not None else _initial_step(rhs, t, y, f, direction, cfg)
    h = min(abs(h), cfg.max_step)

    times = [t]
    states = [y.copy()]
    records: List[EventRecord] = []
    g_values = [float(e.fn(t, y)) for e in events]
    prev_err = 1e-4
    n_steps = 0

    def _finish(termination: Termination) -> Trajectory:
        _LOGGER.debug(
            "Integration stopped (%s) at t=%s after %s steps",
            termination.value,
            times[-1],
            n_steps,
        )
        return Trajectory(
            t=np.array(times),
            y=np.array(states),
            termination=termination,
            events=records,
            n_steps=n_steps,
        )

    while True:
        if n_steps >= cfg.max_steps:
            return _finish(Termination.STEP_CAP)

        remaining = abs(t1 - t)
        last = h >= remaining
        if last:
            h = remaining

        n_steps += 1
        y_new, f_new, error = _dp_step(rhs, t, y, f, direction * h)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        with np.errstate(invalid="ignore", over="ignore"):
            err = float(np.max(np.abs(error) / scale))

        if not np.isfinite(err):
            if not np.all(np.isfinite(y_new)):
                if h <= 1e-14 * max(1.0, abs(t)):
                    return _finish(Termination.BLOW_UP)

            h *= _MIN_FACTOR
            continue

        if err > 1.0:
            # Reject
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / 5.0))
            if h <= 1e-14 * max(1.0, abs(t)):
                raise StiffnessError(f"Step size underflow at t={t} (h={h})")

            continue

        t_new = t1 if last else t + direction * h

        # Events in this step
        crossings = []
        g_new_values = []
        for i, event in enumerate(events):
            g_new = float(event.fn(t_new, y_new))
            g_new_values.append(g_new)
            if _crossed(event, g_values[i], g_new):
                t_event, y_event = _locate(rhs, event, t, y, f, direction * h, g_values[i], cfg)
                crossings.append((direction * (t_event - t), event, t_event, y_event))

        crossings.sort(key=lambda c: c[0])
        for _, event, t_event, y_event in crossings:
            records.append(EventRecord(name=event.name, t=t_event, y=y_event))
            if event.terminal:
                times.append(t_event)
                states.append(y_event)
                return _finish(Termination.EVENT)

        t, y, f = t_new, y_new, f_new
        g_values = g_new_values
        times.append(t)
        states.append(y.copy())

        if (not np.all(np.isfinite(y))) or (np.max(np.abs(y)) > cfg.blow_up):
            return _finish(Termination.BLOW_UP)

        if last:
            return _finish(Termination.TIME_REACHED)

        # PI step-size control
        err = max(err, 1e-10)
        factor = _SAFETY * err ** (-_PI_ALPHA) * prev_err ** _PI_BETA
        h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        h = min(h, cfg.max_step)
        prev_err = err


# -----------------------------------------------------------------------------


def fixed_step(
    rhs: RightHandSide, y0: Sequence[float], t_span: Tuple[float, float], n_steps: int
) -> np.ndarray:
    """Propagate with the fifth-order formula at a constant step (no error control)."""
    assert n_steps >= 1, "Need at least one step"
    y = np.array(y0, dtype=float)
    t0, t1 = float(t_span[0]), float(t_span[1])
    h = (t1 - t0) / n_steps
    t = t0
    f = np.asarray(rhs(t, y), dtype=float)
    for _ in range(n_steps):
        y, f, _error = _dp_step(rhs, t, y, f, h)
        t += h

    return y


class ReferenceProblem(str, Enum):
    """Linear problems with closed-form solutions."""

    DECAY = "decay"
    """y' = -y"""

    ROTATION = "rotation"
    """(y0, y1)' = (y1, -y0)"""

    def rhs(self) -> RightHandSide:
        if self == ReferenceProblem.DECAY:
            return lambda t, y: -y

        return lambda t, y: np.array([y[1], -y[0]])

    def initial(self) -> np.ndarray:
        if self == ReferenceProblem.DECAY:
            return np.array([1.0])

        return np.array([1.0, 0.0])

    def exact(self, t: float) -> np.ndarray:
        if self == ReferenceProblem.DECAY:
            return np.array([math.exp(-t)])

        return np.array([math.cos(t), -math.sin(t)])


def convergence_order(
    problem: ReferenceProblem = ReferenceProblem.DECAY, n_steps: int = 8, t_end: float = 1.0
) -> float:
    """log2 of the error ratio between n_steps and 2 n_steps fixed steps."""
    rhs = problem.rhs()
    y0 = problem.initial()
    exact = problem.exact(t_end)

    err_coarse = np.linalg.norm(fixed_step(rhs, y0, (0.0, t_end), n_steps) - exact)
    err_fine = np.linalg.norm(fixed_step(rhs, y0, (0.0, t_end), 2 * n_steps) - exact)

    return math.log2(err_coarse / err_fine)
