"""
Wiener paths, trajectories and ensemble statistics
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from models.fields import GalerkinState


@dataclass(frozen=True)
class WienerPath:
    """
    Increments of a real Wiener process on a uniform time grid

    increments[i] = W((i + 1) dt) - W(i dt); length * dt = T.
    """
    dt: float
    increments: np.ndarray
    seed: int

    def __post_init__(self):
        increments = np.array(self.increments, dtype=float)
        increments.setflags(write=False)
        object.__setattr__(self, "increments", increments)

    @property
    def n_steps(self) -> int:
        return len(self.increments)

    @property
    def horizon(self) -> float:
        return self.n_steps * self.dt


@dataclass
class Trajectory:
    """
    States of one Galerkin path at every time step

    `states[i]` is m_n(times[i]); states[0] is P_n(m_0).
    """
    times: np.ndarray
    states: List[GalerkinState]
    path: WienerPath
    config_snapshot: Dict[str, Any] = field(default_factory=dict)

    def coefficient_array(self) -> np.ndarray:
        """States stacked as (n_times, n_modes, 3)"""
        return np.stack([s.coefficients for s in self.states])

    @property
    def final_state(self) -> GalerkinState:
        return self.states[-1]


class PathDiagnostics(BaseModel):
    """Per-path quantities of the uniform energy estimates"""
    path_index: int
    seed: int
    failed: bool = False
    failure_step: Optional[int] = None
    sup_h1_squared: Optional[float] = None
    integral_m_cross_lap_squared: Optional[float] = None
    max_sphere_deviation: Optional[float] = None
    integral_grad_l4_fourth: Optional[float] = None
    integral_a1_l2_squared: Optional[float] = None


class EnsembleStats(BaseModel):
    """Monte-Carlo means of the per-path diagnostics over successful paths"""
    n_paths: int
    n_failed: int
    master_seed: int
    moment_order: float = 1.0
    mean_sup_h1_squared: Optional[float] = None
    mean_sup_h1_moment: Optional[float] = None
    mean_integral_m_cross_lap_squared: Optional[float] = None
    mean_sphere_deviation: Optional[float] = None
    mean_integral_grad_l4_fourth: Optional[float] = None
    mean_integral_a1_l2_squared: Optional[float] = None
    paths: List[PathDiagnostics] = Field(default_factory=list)
