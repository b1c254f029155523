import numpy as np
import pytest

from dshock.errors import H3Error, NoConfigurationError, ValidationError
from dshock.model import ModelParams, State
from dshock.riemann import RiemannData, ShockQuantities, shock_quantities
from dshock.singular import (
    ConnectionStatus,
    Side,
    SingularConfig,
    build_configuration,
    check_h3,
    compute_gamma1,
    compute_gamma2,
    explore_h3,
    saddle_at_P,
    saddle_fd_jacobian,
    slow_quantities,
)

P = ModelParams(rho1=2.0, rho2=1.0)
SAMPLE = RiemannData(uL=State(1.9, 1.0), uR=State(1.1, 1.1 / 1.9))
SQ = shock_quantities(SAMPLE, P)
E0 = 2.4 / 7.22


def test_saddle_left():
    saddle = saddle_at_P(Side.LEFT, SQ, P)
    assert saddle.point == (2.0, 0.0)
    assert saddle.lambda_u == pytest.approx(0.5)
    assert saddle.lambda_s == pytest.approx(-0.25)
    assert np.allclose(saddle.y_u, [1.0, 0.0])

    # beta / r of the stable direction is 2 rho1 (s rho1 + w1L) / (3 (rho1 - rho2))
    assert saddle.y_s[1] > 0
    assert saddle.y_s[0] / saddle.y_s[1] == pytest.approx(4.0 * SQ.w1L / 3.0)

    # The printed form divides by 3 (rho1 + rho2)
    assert saddle.printed_y_s is not None
    assert saddle.printed_y_s[0] == pytest.approx(4.0 * SQ.w1L / 9.0)
    assert saddle.warnings


def test_saddle_right():
    saddle = saddle_at_P(Side.RIGHT, SQ, P)
    assert saddle.point == (1.0, 0.0)
    assert saddle.lambda_s == pytest.approx(-1.0)
    assert saddle.lambda_u == pytest.approx(0.5)
    assert np.allclose(saddle.y_s, [1.0, 0.0])

    # Unstable direction enters the strip
    assert saddle.y_u[0] > 0 and saddle.y_u[1] > 0
    assert saddle.y_u[0] / saddle.y_u[1] == pytest.approx(-SQ.w1R / 1.5)
    assert not saddle.warnings


@pytest.mark.parametrize("side", [Side.LEFT, Side.RIGHT])
def test_saddle_fd_jacobian(side):
    saddle = saddle_at_P(side, SQ, P)
    assert np.allclose(saddle_fd_jacobian(side, SQ, P), saddle.jacobian, atol=1e-7)


def test_slow_quantities():
    slow = slow_quantities(SQ, P)
    assert slow.tau10 == pytest.approx(2 * E0 / 3)
    assert slow.tau20 == pytest.approx(E0 / 3)
    assert slow.tau10 + slow.tau20 == pytest.approx(SQ.e0)
    assert slow.kappa0 == pytest.approx(E0 / 6)
    assert slow.kappa0 == pytest.approx(0.0554017, abs=1e-7)
    assert slow.w20 == pytest.approx(SQ.w2L - 2 * E0 / 3)

    # kappa decreases back to 0 along beta = rho2
    assert slow.kappa0 - 0.5 * slow.tau20 == pytest.approx(0.0, abs=1e-15)

    assert slow.printed["v_max_limit"] == pytest.approx(E0 / 3)
    assert any("tau10" in w for w in slow.warnings)
    assert any("kappa0" in w for w in slow.warnings)
    assert any("v_max_limit" in w for w in slow.warnings)

    as_dict = slow.to_dict()
    assert as_dict["kappa0"] == pytest.approx(E0 / 6)
    assert as_dict["warnings"] == slow.warnings


def test_slow_quantities_need_deficit():
    swapped = shock_quantities(SAMPLE.swapped(), P)
    with pytest.raises(NoConfigurationError):
        slow_quantities(swapped, P)


def test_connecting_orbits():
    gamma1 = compute_gamma1(SQ, P)
    assert gamma1.status == ConnectionStatus.LANDED
    assert gamma1.success
    assert gamma1.residual < 1e-6

    # Oriented from uL towards P_L
    assert gamma1.points[-1] == pytest.approx([2.0, 0.0], abs=1e-5)
    assert gamma1.section_point is not None
    assert gamma1.section_point[1] == pytest.approx(0.1, abs=1e-9)

    gamma2 = compute_gamma2(SQ, P)
    assert gamma2.status == ConnectionStatus.LANDED
    assert gamma2.points[0] == pytest.approx([1.0, 0.0], abs=1e-5)
    assert np.all(gamma2.points[:, 0] >= 1.0 - 1e-8)

    # Both orbits stay in the closed strip rho2 <= beta <= rho1, r >= 0
    for orbit in (gamma1, gamma2):
        assert np.all(orbit.points[:, 0] <= P.rho1 + 1e-8)
        assert np.all(orbit.points[:, 0] >= P.rho2 - 1e-8)
        assert np.all(orbit.points[:, 1] >= -1e-8)


def test_gamma1_seeding():
    full = compute_gamma1(SQ, P)
    half = compute_gamma1(SQ, P, delta=0.5 * SingularConfig().delta)
    assert half.success
    assert np.max(np.abs(half.points[0] - full.points[0])) < 1e-5

    assert full.section_point is not None and half.section_point is not None
    assert np.max(np.abs(half.section_point - full.section_point)) < 1e-5


def test_gamma1_pushed_out_of_strip():
    # With w1L = -1 the backward orbit is driven through beta = rho2
    pushed = ShockQuantities(
        s=SQ.s, wL=np.array([-1.0, SQ.w2L]), wR=SQ.wR, e0=SQ.e0, data=SAMPLE
    )
    gamma1 = compute_gamma1(pushed, P)
    assert gamma1.status == ConnectionStatus.LEFT_STRIP
    assert not gamma1.success
    assert "below_rho2" in gamma1.message


def test_h3_fails_without_positive_w2L():
    # theta2 has no positive branch at rho1 and the orbit from P_L misses uL
    negative = ShockQuantities(
        s=SQ.s, wL=np.array([SQ.w1L, -1.0]), wR=SQ.wR, e0=SQ.e0, data=SAMPLE
    )
    report = check_h3(negative, P)
    assert report.gamma1.status != ConnectionStatus.LANDED
    assert not report.verified
    assert not report.structural

    with pytest.raises(H3Error):
        build_configuration(negative, P)


@pytest.mark.parametrize("factor", [1.01, 0.99])
def test_h3_persists_under_perturbation(factor):
    uL, uR = SAMPLE.uL, SAMPLE.uR
    perturbed = RiemannData(
        uL=State(uL.beta * factor, uL.v * factor),
        uR=State(uR.beta / factor, uR.v / factor),
    )
    report = check_h3(shock_quantities(perturbed, P), P)
    assert report.verified
    assert report.boundary_signs


def test_orbits_need_riemann_data():
    by_hand = ShockQuantities(s=SQ.s, wL=SQ.wL, wR=SQ.wR, e0=SQ.e0)
    with pytest.raises(ValidationError):
        compute_gamma1(by_hand, P)


def test_check_h3():
    report = check_h3(SQ, P)
    assert report.verified
    assert report.structural
    assert report.theta1_increasing
    assert report.theta2_decreasing
    assert report.theta2_at_rho1 == pytest.approx(2.0 * SQ.w2L**0.5)
    assert report.divergence_min > 0

    as_dict = report.to_dict()
    assert as_dict["gamma1"]["status"] == "landed"


def test_build_configuration():
    cfg = SingularConfig(n_slow=20)
    config = build_configuration(SQ, P, cfg)
    assert list(config.pieces) == ["gamma1", "sigma1", "gamma0", "sigma2", "gamma2"]
    assert config.max_kappa == pytest.approx(E0 / 6)

    for piece in config.pieces.values():
        assert piece.shape[1] == 6

    # Pieces start and end at the end states and the saddles
    assert config.gamma1[0, :2] == pytest.approx([1.9, 1.0])
    assert config.gamma2[-1, :2] == pytest.approx([1.1, 1.9 / 1.1])
    assert np.all(config.sigma1[:, 0] == 2.0)
    assert np.all(config.sigma2[:, 0] == 1.0)
    assert config.sigma2[-1, 3] == pytest.approx(SQ.w2R)
    assert config.sigma2[-1, 5] == pytest.approx(0.0, abs=1e-14)

    assert len(config.sigma1) == 20


def test_build_configuration_without_connection():
    # Orbits cannot land inside the stopping window
    cfg = SingularConfig(t_max=1e-3)
    with pytest.raises(H3Error):
        build_configuration(SQ, P, cfg)


def test_explore_h3():
    points = explore_h3(SAMPLE.uL, P, n_beta=3, n_v=3)
    assert len(points) == 9
    for point in points:
        if not point.h1:
            assert not point.h3_verified
            assert not point.h3_structural
