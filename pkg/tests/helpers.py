"""
Shared builders for the test modules
"""
import math

from models.params import LlgParams
from models.simulation import Scheme, SimulationSetup
from services.fields import winding_field
from services.spectral import build_basis, project


def make_setup(n_modes=4, grid_points=None, alpha=0.1, h=(0.0, 0.0, 1.0), dt=1e-3, horizon=0.1,
               amplitude=math.pi / 2, scheme=Scheme.HEUN, **kwargs) -> SimulationSetup:
    """Winding-field setup; M defaults to 4n"""
    basis = build_basis(n_modes, grid_points or 4 * n_modes)
    params = LlgParams.with_constant_h(basis, alpha=alpha, h=h)
    return SimulationSetup(
        params=params,
        initial_state=project(winding_field(basis.grid, amplitude), basis),
        dt=dt,
        horizon=horizon,
        scheme=scheme,
        **kwargs,
    )
