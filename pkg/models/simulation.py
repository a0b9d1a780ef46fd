"""
Simulation setup shared by the integrators, ensembles and sweeps
"""
from dataclasses import dataclass, replace
from enum import Enum

from models.fields import GalerkinState
from models.params import LlgParams


class Scheme(str, Enum):
    """Time-stepping schemes for the Galerkin SDE"""
    ITO = "ito"
    HEUN = "heun"


@dataclass(frozen=True)
class SimulationSetup:
    """
    Everything one path needs except the control and the Wiener path
    """
    params: LlgParams
    initial_state: GalerkinState
    dt: float
    horizon: float
    scheme: Scheme = Scheme.HEUN
    renormalize: bool = False
    blowup_threshold: float = 1e6
    stability_limit: float = 1.0

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.horizon < 0.0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")
        if self.initial_state.n_modes != self.params.basis.n_modes:
            raise ValueError(
                f"initial state has {self.initial_state.n_modes} modes, "
                f"basis has {self.params.basis.n_modes}"
            )

    def with_scheme(self, scheme: Scheme) -> "SimulationSetup":
        return replace(self, scheme=scheme)

    def summary(self) -> dict:
        """Plain snapshot stored with trajectories"""
        return {
            "n_modes": self.params.basis.n_modes,
            "grid_points": self.params.basis.grid_points,
            "alpha": self.params.alpha,
            "cutoff_enabled": self.params.cutoff_enabled,
            "dt": self.dt,
            "horizon": self.horizon,
            "scheme": self.scheme.value,
            "renormalize": self.renormalize,
        }
