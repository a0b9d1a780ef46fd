"""
Control parameterization and cost data types
"""
from dataclasses import dataclass, replace
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from models.errors import GridMismatchError
from models.fields import VectorField

DEFAULT_ADMISSIBILITY_RADIUS = 10.0
DEFAULT_TIME_WINDOWS = 4
DEFAULT_SPATIAL_MODES = 2


@dataclass(frozen=True)
class ControlParam:
    """
    Coefficients c_jk in R^3 of u(t,x) = sum_jk c_jk phi_j(t) e_k(x)

    phi_j is the indicator of the j-th of J_t equal windows of [0, T];
    `radius` is the admissibility bound K on the integral of |u|^2_{L2}.
    """
    coefficients: np.ndarray  # (J_t, J_x, 3)
    horizon: float
    radius: float = DEFAULT_ADMISSIBILITY_RADIUS

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=float)
        if coefficients.ndim != 3 or coefficients.shape[2] != 3:
            raise ValueError(f"coefficients must have shape (J_t, J_x, 3), got {coefficients.shape}")
        if not np.all(np.isfinite(coefficients)):
            raise ValueError("control coefficients contain non-finite entries")
        if not self.horizon > 0.0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        if not self.radius > 0.0:
            raise ValueError(f"admissibility radius must be > 0, got {self.radius}")
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def time_windows(self) -> int:
        return self.coefficients.shape[0]

    @property
    def spatial_modes(self) -> int:
        return self.coefficients.shape[1]

    @classmethod
    def zeros(cls, time_windows: int, spatial_modes: int, horizon: float,
              radius: float = DEFAULT_ADMISSIBILITY_RADIUS) -> "ControlParam":
        return cls(np.zeros((time_windows, spatial_modes, 3)), horizon, radius)

    def with_coefficients(self, coefficients: np.ndarray) -> "ControlParam":
        return replace(self, coefficients=coefficients)


@dataclass(frozen=True)
class RealizedControl:
    """
    Control slices u(t, .) on the basis grid, one per time window
    """
    window_values: np.ndarray  # (J_t, M + 1, 3)
    horizon: float

    @property
    def time_windows(self) -> int:
        return self.window_values.shape[0]

    def window_index(self, t: float) -> int:
        """Window containing t, with t = T assigned to the last window"""
        index = int(np.floor(t * self.time_windows / self.horizon + 1e-9))
        return min(max(index, 0), self.time_windows - 1)

    def slice_at(self, t: float) -> VectorField:
        return VectorField(self.window_values[self.window_index(t)])


@dataclass(frozen=True)
class CostSpec:
    """
    Target m_bar and terminal cost Psi(v) = |v - m_bar(T)|^2_{L2}

    The target is deterministic. Without target_path it is constant in time
    and equal to target; with target_path, m_bar(t) = target_path(t) and
    target only fixes the grid. All weights are 1.
    """
    target: VectorField
    target_path: Optional[Callable[[float], VectorField]] = None

    def __post_init__(self):
        _check_sphere_valued(self.target.values)

    def targets_at(self, times: np.ndarray) -> np.ndarray:
        """
        Target values at each time, shape (len(times), M+1, 3)

        Raises:
            GridMismatchError: If target_path returns a field on another grid
            ValueError: If a target value is off the sphere
        """
        if self.target_path is None:
            return np.broadcast_to(self.target.values, (len(times),) + self.target.values.shape)
        values = []
        for t in times:
            target_t = self.target_path(float(t))
            if target_t.grid_size != self.target.grid_size:
                raise GridMismatchError(
                    f"target at t={t:g} sampled on M={target_t.grid_size}, expected M={self.target.grid_size}"
                )
            _check_sphere_valued(target_t.values)
            values.append(target_t.values)
        return np.stack(values)


def _check_sphere_valued(values: np.ndarray) -> None:
    deviation = float(np.max(np.abs(np.linalg.norm(values, axis=1) - 1.0)))
    if deviation > 1e-9:
        raise ValueError(f"target must be sphere-valued, deviation {deviation:.3e}")


class CostReport(BaseModel):
    """Monte-Carlo estimate of J with its three terms"""
    J: float
    tracking: float
    control: float
    terminal: float
    n_paths: int
    n_failed: int = 0
    master_seed: int
    standard_error: float = 0.0
    failed_paths: List[int] = Field(default_factory=list)


class OptimizationStep(BaseModel):
    """One row of the optimizer trace"""
    iteration: int
    J: float
    J_candidate: Optional[float] = None
    step_size: float
    perturbation: float
    accepted: bool


class OptimizationResult(BaseModel):
    """Best control found and the trace that led to it"""
    best_J: float
    best_coefficients: List[List[List[float]]]
    horizon: float
    radius: float
    initial_J: float
    trace: List[OptimizationStep] = Field(default_factory=list)

    def best_param(self) -> ControlParam:
        """Best-seen parameters as a ControlParam"""
        return ControlParam(np.array(self.best_coefficients), self.horizon, self.radius)
