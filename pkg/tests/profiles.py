"""Profiles shared by the tests.

Hand-built ones with a known spike, and the shot profiles of the sample
data down to eps = 0.01 (slow, computed once per session).
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import exprel

from dshock.model import ModelParams, State
from dshock.profile import (
    ProfileResult,
    ShootingParams,
    SweepResult,
    sample_crossings,
    sweep,
)
from dshock.riemann import RiemannData

EPS = 0.01
R0 = 0.1

# log v rises linearly from 0 at |xi| = 0.2 to log 10 at |xi| = 0.1, then
# with slope PEAK_SLOPE up to xi = 0
PEAK_SLOPE = 30.0

# Integral of v between the crossings of v = 10
INNER_INTEGRAL = 2.0 * 10.0 * (math.exp(0.1 * PEAK_SLOPE) - 1.0) / PEAK_SLOPE


def _log_v(xi: np.ndarray) -> np.ndarray:
    distance = np.abs(xi)
    outer = math.log(10.0) * (0.2 - distance) / 0.1
    inner = math.log(10.0) + PEAK_SLOPE * (0.1 - distance)
    return np.where(distance >= 0.1, outer, inner)


def synthetic_profile(beta_value: float = 1.5) -> ProfileResult:
    xi = np.concatenate(
        [
            np.linspace(-0.2, -0.1, 101),
            np.linspace(-0.1, 0.0, 101)[1:],
            np.linspace(0.0, 0.1, 101)[1:],
            np.linspace(0.1, 0.2, 101)[1:],
        ]
    )
    log_v = _log_v(xi)
    v = np.exp(log_v)

    # zeta' = v / eps, exact for log v linear between samples
    panels = np.diff(xi) * np.exp(log_v[:-1]) * exprel(np.diff(log_v))
    zeta = np.concatenate([[0.0], np.cumsum(panels)]) / EPS

    profile = ProfileResult(
        eps=EPS,
        s=0.0,
        xi=xi,
        beta=np.full_like(xi, beta_value),
        v=v,
        r=1.0 / v,
        kappa=EPS * log_v,
        w1=-0.05 - EPS * xi,
        w2=0.1 - EPS * xi,
        chart=np.zeros(len(xi), dtype=int),
        zeta=zeta,
        params=ShootingParams(alpha=-0.2, theta=0.0, xi_end=0.2),
        residual=0.0,
        residual_vector=np.zeros(4),
        max_eps_log_v=float(np.max(EPS * log_v)),
        r0=R0,
        success=True,
    )
    profile.r0_crossings = sample_crossings(profile, R0)

    return profile


SAMPLE_MODEL = ModelParams(rho1=2.0, rho2=1.0)
SAMPLE_DATA = RiemannData(uL=State(1.9, 1.0), uR=State(1.1, 1.1 / 1.9))
SWEEP_EPS = (0.1, 0.05, 0.02, 0.01)


@lru_cache(maxsize=None)
def sample_sweep() -> SweepResult:
    return sweep(SAMPLE_DATA, SAMPLE_MODEL, eps_list=list(SWEEP_EPS))
