"""Lax-Friedrichs finite volumes for beta_t + (v B1)_x = 0, v_t + (v^2 B2)_x = 0."""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd

from .errors import DegenerateDataError, FvBlowUpError, InvalidParamsError
from .model import ModelParams, flux, speed_bound
from .riemann import RiemannData, ShockQuantities, shock_quantities

_LOGGER = logging.getLogger("dshock.fv")

HISTORY_COLUMNS = (
    "step",
    "t",
    "max_v",
    "min_beta",
    "max_beta",
    "total_beta",
    "total_v",
    "outflow_beta",
    "outflow_v",
    "delta_ratio",
    "centroid",
    "peak_x",
)


@dataclass(frozen=True)
class Grid1D:
    """Uniform cells on [x_min, x_max]."""

    x_min: float = -1.0
    x_max: float = 1.0
    n_cells: int = 400

    def __post_init__(self):
        if self.n_cells < 10:
            raise InvalidParamsError(f"Grid needs at least 10 cells, got {self.n_cells}")

        if not self.x_max > self.x_min:
            raise InvalidParamsError(
                f"Grid bounds must satisfy x_min < x_max, got [{self.x_min}, {self.x_max}]"
            )

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass
class FvState:
    """Cell averages at time t."""

    beta: np.ndarray
    v: np.ndarray
    t: float
    step: int
    grid: Grid1D

    outflow: np.ndarray = field(default_factory=lambda: np.zeros(2))
    """Time-integrated flux out of the domain, per component."""

    @property
    def totals(self) -> np.ndarray:
        return self.grid.dx * np.array([np.sum(self.beta), np.sum(self.v)])


@dataclass
class FvRun:
    """Time series of a run and its last state."""

    history: pd.DataFrame
    final: FvState
    blew_up: bool = False
    blow_up_step: Optional[int] = None


# -----------------------------------------------------------------------------


def initial_state(rd: RiemannData, grid: Grid1D) -> FvState:
    """Riemann data with the jump at x = 0."""
    left = grid.centers < 0
    return FvState(
        beta=np.where(left, rd.uL.beta, rd.uR.beta).astype(float),
        v=np.where(left, rd.uL.v, rd.uR.v).astype(float),
        t=0.0,
        step=0,
        grid=grid,
    )


def time_step(state: FvState, p: ModelParams, cfl: float) -> float:
    """cfl dx / max(c_max, 1)."""
    c_max = float(np.max(speed_bound(state.beta, state.v, p)))
    return cfl * state.grid.dx / max(c_max, 1.0)


def lf_step(state: FvState, p: ModelParams, cfl: float) -> FvState:
    """One Lax-Friedrichs step with copied ghost cells at both ends."""
    if not 0 < cfl <= 1:
        raise InvalidParamsError(f"CFL number must be in (0, 1], got {cfl}")

    dx = state.grid.dx
    dt = time_step(state, p, cfl)

    u = np.stack([state.beta, state.v])
    padded = np.concatenate([u[:, :1], u, u[:, -1:]], axis=1)
    f = flux(padded, p)

    # Interface fluxes F_{j+1/2}
    interface = 0.5 * (f[:, :-1] + f[:, 1:]) - (0.5 * dx / dt) * (
        padded[:, 1:] - padded[:, :-1]
    )
    u_new = u - (dt / dx) * (interface[:, 1:] - interface[:, :-1])

    step = state.step + 1
    if not np.all(np.isfinite(u_new)):
        raise FvBlowUpError(step)

    return replace(
        state,
        beta=u_new[0],
        v=u_new[1],
        t=state.t + dt,
        step=step,
        outflow=state.outflow + dt * (interface[:, -1] - interface[:, 0]),
    )


def _background(state: FvState, sq: ShockQuantities) -> np.ndarray:
    assert sq.data is not None, "Shock quantities carry no Riemann data"
    x = state.grid.centers
    return np.where(x < sq.s * state.t, sq.data.uL.v, sq.data.uR.v)


def delta_estimate(state: FvState, sq: ShockQuantities) -> float:
    """(integral of v minus the piecewise background) / t, to compare with e0."""
    if state.t == 0:
        return 0.0

    excess = state.grid.dx * float(np.sum(state.v - _background(state, sq)))
    return excess / state.t


def spike_centroid(state: FvState, sq: ShockQuantities) -> float:
    """Centroid of v - max(vL, vR) over the spike; NaN when there is no spike.

    The spike is the run of cells around max v where v exceeds both far-field
    values. The smeared jump of the background stays below max(vL, vR), so
    only the spike itself is weighed.
    """
    assert sq.data is not None, "Shock quantities carry no Riemann data"
    excess = state.v - max(sq.data.uL.v, sq.data.uR.v)
    peak = int(np.argmax(state.v))
    if not excess[peak] > 0:
        return math.nan

    below = np.flatnonzero(excess <= 0)
    lo = int(below[below < peak].max(initial=-1)) + 1
    hi = int(below[below > peak].min(initial=len(excess)))
    weights = excess[lo:hi]

    return float(np.sum(state.grid.centers[lo:hi] * weights) / np.sum(weights))


def spike_peak(state: FvState) -> float:
    """Cell center of max v."""
    return float(state.grid.centers[int(np.argmax(state.v))])


def _record(state: FvState, sq: Optional[ShockQuantities]) -> dict:
    totals = state.totals
    return {
        "step": state.step,
        "t": state.t,
        "max_v": float(np.max(state.v)),
        "min_beta": float(np.min(state.beta)),
        "max_beta": float(np.max(state.beta)),
        "total_beta": float(totals[0]),
        "total_v": float(totals[1]),
        "outflow_beta": float(state.outflow[0]),
        "outflow_v": float(state.outflow[1]),
        "delta_ratio": delta_estimate(state, sq) if sq is not None else math.nan,
        "centroid": spike_centroid(state, sq) if sq is not None else math.nan,
        "peak_x": spike_peak(state),
    }


def run(
    rd: RiemannData,
    p: ModelParams,
    grid: Optional[Grid1D] = None,
    cfl: float = 0.05,
    n_steps: int = 20_000,
    record_every: int = 100,
) -> FvRun:
    """Step Riemann data until n_steps or blow-up, recording every record_every steps."""
    grid = grid or Grid1D()
    if record_every < 1:
        raise InvalidParamsError(f"record_every must be positive, got {record_every}")

    try:
        sq: Optional[ShockQuantities] = shock_quantities(rd, p)
    except DegenerateDataError:
        sq = None

    state = initial_state(rd, grid)
    rows = [_record(state, sq)]
    blow_up_step: Optional[int] = None

    for _ in range(n_steps):
        try:
            state = lf_step(state, p, cfl)
        except FvBlowUpError as err:
            _LOGGER.warning("Lax-Friedrichs run blew up at step %s", err.step)
            blow_up_step = err.step
            break

        if (state.step % record_every) == 0:
            rows.append(_record(state, sq))

    if rows[-1]["step"] != state.step:
        rows.append(_record(state, sq))

    _LOGGER.debug("Lax-Friedrichs run stopped at step %s, t=%s", state.step, state.t)

    return FvRun(
        history=pd.DataFrame(rows, columns=list(HISTORY_COLUMNS)),
        final=state,
        blew_up=blow_up_step is not None,
        blow_up_step=blow_up_step,
    )
