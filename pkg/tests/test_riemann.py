import math

import numpy as np
import pytest

from dshock.errors import DegenerateDataError
from dshock.model import ModelParams, State, eigenvalues, flux
from dshock.riemann import (
    RiemannData,
    ShockQuantities,
    boundary_sign_check,
    check_h1,
    check_h2,
    check_h3_sufficient,
    classify,
    curve_left,
    curve_right,
    in_overcompressive_region,
    oc_boundary_curves,
    region_grid,
    shock_quantities,
    shock_speed,
)

P = ModelParams(rho1=2.0, rho2=1.0)
UL = State(1.9, 1.0)
SAMPLE = RiemannData(uL=UL, uR=State(1.1, 1.1 / 1.9))

# w2L - w2R = 1.61 / 7.22 + 0.79 / 7.22
E0 = 2.4 / 7.22


def test_shock_speed():
    assert shock_speed(SAMPLE, P) == pytest.approx(0.0, abs=1e-14)

    other = RiemannData(uL=State(1.8, 2.0), uR=State(1.2, 0.7))
    s = shock_speed(other, P)
    f_left, f_right = flux(other.uL, P), flux(other.uR, P)
    assert (f_left[0] - s * other.uL.beta) == pytest.approx(f_right[0] - s * other.uR.beta)


def test_shock_speed_degenerate():
    with pytest.raises(DegenerateDataError) as err:
        shock_speed(RiemannData(uL=UL, uR=State(1.9, 3.0)), P)

    assert "beta_L - beta_R" in str(err.value)


def test_shock_quantities():
    sq = shock_quantities(SAMPLE, P)
    assert np.allclose(sq.wL, [-0.05, 0.22], atol=0.005)
    assert np.allclose(sq.wR, [-0.05, -0.11], atol=0.005)
    assert sq.w1L == pytest.approx(-0.0473684, abs=1e-7)
    assert sq.w2L == pytest.approx(0.2229917, abs=1e-7)
    assert sq.w1L == pytest.approx(sq.w1R)
    assert sq.e0 == pytest.approx(E0, rel=1e-12)
    assert sq.data == SAMPLE

    as_dict = sq.to_dict()
    assert as_dict["e0"] == pytest.approx(E0)
    assert as_dict["wL"] == pytest.approx([sq.w1L, sq.w2L])


def test_check_h1():
    assert check_h1(SAMPLE, P)
    assert not check_h1(RiemannData(uL=UL, uR=UL), P)

    # uR on the curve where s = Re lambda(uR)
    beta_r = 1.1
    on_curve = RiemannData(uL=UL, uR=State(beta_r, float(curve_right(beta_r, UL, P))))
    assert shock_speed(on_curve, P) == pytest.approx(
        eigenvalues(on_curve.uR, P).real_part, abs=1e-12
    )
    assert not check_h1(on_curve, P)


def test_check_h2():
    assert check_h2(SAMPLE, P)
    assert not check_h2(SAMPLE.swapped(), P)
    assert not check_h2(RiemannData(uL=UL, uR=UL), P)


def test_h1_implies_h2_and_boundary_signs():
    grid = region_grid(UL, P, n_beta=50, n_v=50)
    assert grid.h1.sum() > 0

    for i, beta_r in enumerate(grid.beta):
        for j, v_r in enumerate(grid.v):
            if grid.h1[i, j]:
                rd = RiemannData(uL=UL, uR=State(float(beta_r), float(v_r)))
                assert check_h2(rd, P)
                assert boundary_sign_check(shock_quantities(rd, P), P)


def test_boundary_curves():
    curves = oc_boundary_curves(UL, P, n_samples=50)
    assert curves.beta[0] == P.rho2
    assert curves.beta[-1] == UL.beta

    # Curves meet at uL
    assert curves.v_left[-1] == pytest.approx(UL.v)
    assert curves.v_right[-1] == pytest.approx(UL.v)

    expected = (-0.09 / 1.9 - 2 * (1.61 / 7.22) * 0.4) / (-1.0 / 6.0)
    assert float(curve_left(1.5, UL, P)) == pytest.approx(expected)
    assert float(curve_left(1.5, UL, P)) == pytest.approx(1.3545706, abs=1e-6)

    # Pole of B1 at beta = rho2
    assert not curves.valid_left[0]
    assert curves.valid_right.shape == curves.beta.shape


def test_region_at_sample():
    assert float(curve_right(1.1, UL, P)) == pytest.approx(0.078408, abs=1e-6)
    assert float(curve_left(1.1, UL, P)) == pytest.approx(4.93967, abs=1e-5)

    assert in_overcompressive_region(SAMPLE, P)

    on_curve = RiemannData(uL=UL, uR=State(1.1, float(curve_left(1.1, UL, P))))
    assert not in_overcompressive_region(on_curve, P)

    outside = RiemannData(uL=UL, uR=State(2.5, 1.0))
    assert not in_overcompressive_region(outside, P)


def test_region_matches_h1():
    grid = region_grid(UL, P)
    assert grid.h1.shape == (50, 50)
    assert np.array_equal(grid.h1, grid.in_region)
    assert grid.in_region.any()


def test_boundary_sign_check():
    sq = shock_quantities(SAMPLE, P)
    assert boundary_sign_check(sq, P)

    by_hand = ShockQuantities(
        s=0.0, wL=np.array([1.0, 0.2]), wR=np.array([1.0, -0.1]), e0=0.3
    )
    assert not boundary_sign_check(by_hand, P)


def test_check_h3_sufficient():
    sq = shock_quantities(SAMPLE, P)
    assert check_h3_sufficient(SAMPLE, sq, P, s_max=0.05)
    assert not check_h3_sufficient(SAMPLE, sq, P, s_max=0.0)

    above = RiemannData(uL=UL, uR=State(1.6, 0.5))
    assert not check_h3_sufficient(above, shock_quantities(above, P), P)


def test_classify():
    verdicts = classify(SAMPLE, P)
    assert not verdicts.degenerate
    assert verdicts.h1 and verdicts.h2 and verdicts.h3_sufficient
    assert verdicts.in_region
    assert verdicts.boundary_signs
    assert verdicts.real_part_left == pytest.approx(0.4459834, abs=1e-7)

    as_dict = verdicts.to_dict()
    assert as_dict["shock"]["e0"] == pytest.approx(E0)

    degenerate = classify(RiemannData(uL=UL, uR=State(1.9, 0.5)), P)
    assert degenerate.degenerate
    assert not degenerate.h1
    assert math.isnan(degenerate.real_part_left)
