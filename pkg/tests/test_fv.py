import math

import numpy as np
import pytest

from dshock.errors import FvBlowUpError, InvalidParamsError
from dshock.fv import (
    HISTORY_COLUMNS,
    FvState,
    Grid1D,
    delta_estimate,
    initial_state,
    lf_step,
    run,
    spike_centroid,
    spike_peak,
    time_step,
)
from dshock.model import ModelParams, State, flux
from dshock.riemann import RiemannData, shock_quantities

P = ModelParams(rho1=2.0, rho2=1.0)
SAMPLE = RiemannData(uL=State(1.9, 1.0), uR=State(1.1, 1.1 / 1.9))
SQ = shock_quantities(SAMPLE, P)


def test_grid():
    grid = Grid1D(x_min=0.0, x_max=1.0, n_cells=10)
    assert grid.dx == pytest.approx(0.1)
    assert grid.centers[0] == pytest.approx(0.05)
    assert grid.centers[-1] == pytest.approx(0.95)

    with pytest.raises(InvalidParamsError):
        Grid1D(n_cells=5)

    with pytest.raises(InvalidParamsError):
        Grid1D(x_min=1.0, x_max=-1.0)


def test_initial_state():
    state = initial_state(SAMPLE, Grid1D(n_cells=20))
    assert np.all(state.beta[:10] == 1.9)
    assert np.all(state.beta[10:] == 1.1)
    assert np.all(state.v[:10] == 1.0)
    assert state.t == 0.0
    assert state.step == 0


def test_constant_state_is_steady():
    grid = Grid1D(n_cells=20)
    state = FvState(beta=np.full(20, 1.5), v=np.full(20, 0.7), t=0.0, step=0, grid=grid)
    next_state = lf_step(state, P, 0.5)

    assert np.array_equal(next_state.beta, state.beta)
    assert np.array_equal(next_state.v, state.v)
    assert next_state.step == 1
    assert next_state.t == pytest.approx(time_step(state, P, 0.5))


def test_stencil():
    grid = Grid1D(n_cells=10)
    rng = np.random.default_rng(4)
    state = FvState(
        beta=rng.uniform(1.1, 1.9, 10),
        v=rng.uniform(0.5, 1.5, 10),
        t=0.0,
        step=0,
        grid=grid,
    )
    cfl = 0.4
    dt = time_step(state, P, cfl)
    next_state = lf_step(state, P, cfl)

    u = np.stack([state.beta, state.v])
    padded = np.concatenate([u[:, :1], u, u[:, -1:]], axis=1)
    f = flux(padded, P)
    expected = 0.5 * (padded[:, :-2] + padded[:, 2:]) - (0.5 * dt / grid.dx) * (
        f[:, 2:] - f[:, :-2]
    )

    assert next_state.beta == pytest.approx(expected[0], rel=1e-12)
    assert next_state.v == pytest.approx(expected[1], rel=1e-12)

    # Ghost cell copies the first cell
    assert next_state.beta[0] == pytest.approx(
        0.5 * (u[0, 0] + u[0, 1]) - (0.5 * dt / grid.dx) * (f[0, 2] - f[0, 1]), rel=1e-12
    )


def test_conservation():
    state = initial_state(SAMPLE, Grid1D(n_cells=100))
    start = state.totals
    for _ in range(200):
        state = lf_step(state, P, 0.05)

    assert state.totals + state.outflow == pytest.approx(start, abs=1e-10)


def test_invalid_cfl():
    state = initial_state(SAMPLE, Grid1D(n_cells=20))
    with pytest.raises(InvalidParamsError):
        lf_step(state, P, 0.0)

    with pytest.raises(InvalidParamsError):
        lf_step(state, P, 1.5)

    with pytest.raises(InvalidParamsError):
        run(SAMPLE, P, grid=Grid1D(n_cells=20), cfl=2.0, n_steps=10)


def test_blow_up():
    state = initial_state(SAMPLE, Grid1D(n_cells=20))
    state.v[5] = math.nan

    with pytest.raises(FvBlowUpError) as excinfo:
        lf_step(state, P, 0.05)

    assert excinfo.value.step == 1


def test_diagnostics_at_start():
    state = initial_state(SAMPLE, Grid1D(n_cells=20))
    assert delta_estimate(state, SQ) == 0.0
    assert math.isnan(spike_centroid(state, SQ))


def test_spike_centroid():
    grid = Grid1D(x_min=0.0, x_max=1.0, n_cells=20)
    v = np.where(grid.centers < 0.5, SAMPLE.uL.v, SAMPLE.uR.v)
    v[8:11] = [1.5, 3.0, 2.0]

    # A separate bump away from the peak is not part of the spike
    v[15] = 1.2
    state = FvState(beta=np.full(20, 1.5), v=v, t=1.0, step=10, grid=grid)

    excess = np.array([0.5, 2.0, 1.0])
    expected = np.sum(grid.centers[8:11] * excess) / np.sum(excess)
    assert spike_centroid(state, SQ) == pytest.approx(expected)
    assert spike_peak(state) == pytest.approx(grid.centers[9])

    # The smeared jump alone is no spike
    smeared = np.linspace(SAMPLE.uL.v, SAMPLE.uR.v, 20)
    flat = FvState(beta=np.full(20, 1.5), v=smeared, t=1.0, step=10, grid=grid)
    assert math.isnan(spike_centroid(flat, SQ))


def test_run_history():
    fv_run = run(SAMPLE, P, grid=Grid1D(n_cells=40), n_steps=200, record_every=50)

    assert list(fv_run.history.columns) == list(HISTORY_COLUMNS)
    assert list(fv_run.history["step"]) == [0, 50, 100, 150, 200]
    assert not fv_run.blew_up
    assert fv_run.blow_up_step is None
    assert fv_run.final.step == 200

    last = fv_run.history.iloc[-1]
    assert last["t"] == pytest.approx(fv_run.final.t)
    assert last["total_beta"] + last["outflow_beta"] == pytest.approx(
        fv_run.history.iloc[0]["total_beta"], abs=1e-10
    )


def test_run_uneven_record():
    fv_run = run(SAMPLE, P, grid=Grid1D(n_cells=20), n_steps=25, record_every=10)
    assert list(fv_run.history["step"]) == [0, 10, 20, 25]

    with pytest.raises(InvalidParamsError):
        run(SAMPLE, P, grid=Grid1D(n_cells=20), n_steps=10, record_every=0)


@pytest.mark.slow
def test_run_sample():
    grid = Grid1D()
    fv_run = run(SAMPLE, P, grid=grid, cfl=0.05, n_steps=20_000)
    history = fv_run.history.set_index("step")
    first, early, last = history.loc[0], history.loc[2000], history.loc[20_000]

    # v keeps concentrating at the shock
    assert last["max_v"] > early["max_v"] > first["max_v"]

    assert last["total_beta"] + last["outflow_beta"] == pytest.approx(
        first["total_beta"], rel=1e-10
    )
    assert last["total_v"] + last["outflow_v"] == pytest.approx(first["total_v"], rel=1e-8)

    # The spike sits in the numerical viscous layer at x = s t, which is about
    # ten cells wide at CFL 0.05, and does not wander off
    shock_x = SQ.s * last["t"]
    assert abs(last["peak_x"] - shock_x) <= 20 * grid.dx
    assert abs(last["centroid"] - shock_x) <= 20 * grid.dx

    half = history.loc[10_000]
    drift = (last["centroid"] - half["centroid"]) / (last["t"] - half["t"])
    assert abs(drift - SQ.s) < 0.1
