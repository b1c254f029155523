import numpy as np
import pytest

from dshock.errors import DomainError, InvalidParamsError
from dshock.model import (
    ModelParams,
    State,
    b1,
    b1_prime,
    b2,
    b2_prime,
    bendixson_divergence,
    eigenvalues,
    flux,
    is_hyperbolic,
    jacobian,
    speed_bound,
    theta1,
)

P = ModelParams(rho1=2.0, rho2=1.0)


def test_model_params_validation():
    with pytest.raises(InvalidParamsError):
        ModelParams(rho1=1.0, rho2=2.0)

    with pytest.raises(InvalidParamsError):
        ModelParams(rho1=1.0, rho2=0.0)

    assert P.beta_star == pytest.approx(2**0.5)
    assert P.in_strip(1.5)
    assert not P.in_strip(2.5)


def test_b1():
    assert b1(2.0, P) == 0.0
    assert b1(1.9, P) == pytest.approx(-0.09 / 1.9)
    assert b1(1.9, P) == pytest.approx(-0.0473684, abs=1e-7)
    assert b1(1.1, P) == pytest.approx(-0.0818182, abs=1e-7)


def test_b2():
    assert b2(2**0.5, P) == pytest.approx(0.0, abs=1e-15)
    assert b2(1.9, P) == pytest.approx(0.2229917, abs=1e-7)
    assert b2(2.0, P) == 0.25


def test_pole():
    for func in (b1, b2, b1_prime, b2_prime):
        with pytest.raises(DomainError):
            func(0.0, P)

    with pytest.raises(DomainError):
        b1(np.array([1.0, 0.0]), P)


def test_derivatives():
    assert b1_prime(2.0, P) == pytest.approx(0.5)
    assert b2_prime(1.0, P) == pytest.approx(2.0)

    # B1' = 2 B2 for any beta
    beta = np.linspace(0.3, 4.0, 50)
    assert np.allclose(b1_prime(beta, P) - 2.0 * b2(beta, P), 0.0, atol=1e-14)


def test_vectorized():
    beta = np.array([1.1, 1.9, 2.0])
    values = b1(beta, P)
    assert isinstance(values, np.ndarray)
    assert values.shape == (3,)
    assert isinstance(b1(1.5, P), float)


def test_flux():
    assert np.allclose(flux(State(2.0, 5.0), P), [0.0, 6.25])
    assert np.allclose(flux(State(1.9, 1.0), P), [-0.0473684, 0.2229917], atol=1e-7)
    assert np.allclose(flux(State(1.5, 0.0), P), [0.0, 0.0])

    cells = np.array([[1.9, 2.0], [1.0, 5.0]])
    assert np.allclose(flux(cells, P), [[-0.09 / 1.9, 0.0], [1.61 / 7.22, 6.25]])


def test_jacobian():
    jac = jacobian(State(1.5, 0.0), P)
    assert np.allclose(jac, [[0.0, b1(1.5, P)], [0.0, 0.0]])

    u = State(1.7, 2.3)
    assert np.trace(jacobian(u, P)) == pytest.approx(4 * 2.3 * b2(1.7, P))


def test_eigenvalues():
    left = eigenvalues(State(1.9, 1.0), P)
    assert left.real_part == pytest.approx(0.4459834, abs=1e-7)
    assert not left.is_real
    assert left.lambda_plus == pytest.approx(left.lambda_minus.conjugate())

    right = eigenvalues(State(1.1, 1.1 / 1.9), P)
    assert right.real_part == pytest.approx(-0.3779904, abs=1e-7)

    # Radical vanishes on beta = rho1
    edge = eigenvalues(State(2.0, 3.0), P)
    assert edge.is_real
    assert edge.lambda_plus == pytest.approx(2 * 3.0 * 0.25)
    assert edge.lambda_plus == edge.lambda_minus


def test_eigenvalues_match_numpy():
    u = State(1.4, 0.8)
    expected = np.sort_complex(np.linalg.eigvals(jacobian(u, P)))
    pair = eigenvalues(u, P)
    actual = np.sort_complex(np.array([pair.lambda_plus, pair.lambda_minus]))
    assert np.allclose(actual, expected)


def test_is_hyperbolic():
    assert is_hyperbolic(State(2.0, 3.0), P)
    assert not is_hyperbolic(State(1.5, 1.0), P)
    assert is_hyperbolic(State(1.5, 0.0), P)
    assert is_hyperbolic(State(2.5, 1.0), P)


def test_speed_bound():
    for u in (State(1.9, 1.0), State(1.1, 0.5), State(2.5, -3.0)):
        pair = eigenvalues(u, P)
        assert speed_bound(u.beta, u.v, P) >= abs(pair.lambda_plus.real) + abs(
            pair.lambda_plus.imag
        ) - 1e-12


def test_frozen_fast_helpers():
    # Divergence of the fast field at xi = s is the trace minus 2 s
    assert bendixson_divergence(1.9, 2.0, 0.1, P) == pytest.approx(4 * 2.0 * b2(1.9, P) - 0.2)

    # theta1 is where beta' = v B1 - s beta - w1 vanishes
    beta, s, w1 = 1.8, 0.01, -0.05
    v = theta1(beta, s, w1, P)
    assert v * b1(beta, P) - s * beta - w1 == pytest.approx(0.0, abs=1e-12)
