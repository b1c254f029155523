"""Numerical laboratory for singular (delta) shocks of a two-phase flow model"""

from .config import RunConfig
from .errors import DShockError, NumericalError, ValidationError
from .fv import FvState, Grid1D, lf_step
from .integrate import IntegratorConfig, integrate
from .model import ModelParams, State, eigenvalues, flux
from .profile import ProfileResult, ShootingConfig, shoot, sweep
from .riemann import RiemannData, ShockQuantities, classify, shock_quantities
from .singular import SingularConfig, build_configuration, slow_quantities
from .weak_limit import analyze, pair_similarity, spacetime_delta_coefficient
