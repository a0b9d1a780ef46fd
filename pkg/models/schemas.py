"""
Pydantic schemas for run configuration validation
"""
import math
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from models.control import DEFAULT_ADMISSIBILITY_RADIUS, DEFAULT_SPATIAL_MODES, DEFAULT_TIME_WINDOWS
from models.params import DEFAULT_ALPHA, DEFAULT_H
from models.report import SweepAxis, SweepMetric, Thresholds
from models.simulation import Scheme


class FieldKind(str, Enum):
    CONSTANT = "constant"
    COSINE = "cosine"


class InitialPreset(str, Enum):
    CONSTANT_UP = "constant-up"
    WINDING = "winding"
    TILTED = "tilted"


class FieldSpec(BaseModel):
    """Noise direction h: a constant vector or vector * sqrt(2) cos(k pi x)"""
    kind: FieldKind = FieldKind.CONSTANT
    vector: Tuple[float, float, float] = DEFAULT_H
    mode: int = Field(default=1, ge=1)


class InitialConditionSpec(BaseModel):
    """Sphere-valued initial magnetization preset"""
    preset: InitialPreset = InitialPreset.WINDING
    amplitude: float = math.pi / 2
    vector: Optional[Tuple[float, float, float]] = None

    @model_validator(mode="after")
    def validate_preset(self):
        """Tilted data needs a nonzero direction so it can be normalized onto the sphere"""
        if self.preset == InitialPreset.TILTED:
            if self.vector is None or math.hypot(*self.vector) == 0.0:
                raise ValueError("m0 preset 'tilted' requires a nonzero vector")
        if not math.isfinite(self.amplitude):
            raise ValueError("m0 amplitude must be finite")
        return self


class ControlSpec(BaseModel):
    """Piecewise-constant-in-time control family"""
    time_windows: int = Field(default=DEFAULT_TIME_WINDOWS, ge=1)
    spatial_modes: int = Field(default=DEFAULT_SPATIAL_MODES, ge=1)
    radius: float = Field(default=DEFAULT_ADMISSIBILITY_RADIUS, gt=0)
    coefficients: Optional[List[List[List[float]]]] = None

    @model_validator(mode="after")
    def validate_shape(self):
        """Explicit coefficients must have shape (time_windows, spatial_modes, 3)"""
        if self.coefficients is not None:
            rows = self.coefficients
            ok = len(rows) == self.time_windows and all(
                len(r) == self.spatial_modes and all(len(c) == 3 for c in r) for r in rows
            )
            if not ok:
                raise ValueError(
                    f"control coefficients must have shape ({self.time_windows}, {self.spatial_modes}, 3)"
                )
        return self


class CostTargetSpec(BaseModel):
    """
    Spatially constant target m_bar(t) = R_z(angular_velocity * t) vector

    angular_velocity = 0 (the default) keeps the target fixed in time.
    """
    vector: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    angular_velocity: float = 0.0

    @field_validator("vector")
    @classmethod
    def validate_unit(cls, v):
        """Target must be a unit vector"""
        if abs(math.hypot(*v) - 1.0) > 1e-9:
            raise ValueError("target vector must have unit length")
        return v


class GridCheckSpec(BaseModel):
    """Brute-force validation grid over two control coefficients"""
    axes: List[Tuple[int, int, int]]
    lower: float = -2.0
    upper: float = 2.0
    points: int = Field(default=41, ge=2)

    @field_validator("axes")
    @classmethod
    def validate_axes(cls, v):
        if len(v) != 2:
            raise ValueError("grid check needs exactly 2 axes")
        return v


class OptimizerConfig(BaseModel):
    """SPSA iteration count, gains and acceptance flags"""
    iterations: int = Field(default=40, ge=0)
    a: float = Field(default=0.3, gt=0)
    c: float = Field(default=0.2, gt=0)
    A: float = Field(default=5.0, ge=0)
    alpha_exponent: float = 0.602
    gamma_exponent: float = 0.101
    crn: bool = True
    greedy: bool = True
    seed: int = Field(default=0, ge=0)
    components: Optional[List[int]] = None
    grid_check: Optional[GridCheckSpec] = None

    @field_validator("components")
    @classmethod
    def validate_components(cls, v):
        if v is not None and (not v or any(c not in (0, 1, 2) for c in v)):
            raise ValueError("components must be a non-empty subset of {0, 1, 2}")
        return v


class SweepSpec(BaseModel):
    """One convergence study of the invariants command"""
    name: str
    axis: SweepAxis
    values: List[float]
    metric: SweepMetric = SweepMetric.REFERENCE_ERROR
    paired_dt: Optional[List[float]] = None
    n_paths: int = Field(default=1, ge=1)
    n_modes: Optional[int] = Field(default=None, ge=1)
    alpha: Optional[float] = Field(default=None, gt=0)
    scheme: Optional[Scheme] = None

    @field_validator("values")
    @classmethod
    def validate_values(cls, v):
        if len(v) < 2:
            raise ValueError("a sweep needs at least 2 values")
        if any(x <= 0 for x in v):
            raise ValueError("sweep values must be positive")
        return v


class RunConfig(BaseModel):
    """Fully resolved configuration of one run"""
    n_modes: int = Field(default=8, ge=1)
    grid_points: int = 64
    T: float = Field(default=1.0, gt=0)
    dt: float = Field(default=1e-3, gt=0)
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0)
    h: FieldSpec = Field(default_factory=FieldSpec)
    m0: InitialConditionSpec = Field(default_factory=InitialConditionSpec)
    scheme: Scheme = Scheme.HEUN
    renormalize: bool = False
    cutoff: bool = False
    n_paths: int = Field(default=1, ge=1)
    master_seed: int = Field(default=0, ge=0, lt=2 ** 64)
    output_dir: str = "output"
    save_stride: int = Field(default=1, ge=1)
    moment_order: float = Field(default=1.0, ge=1)
    blowup_threshold: float = Field(default=1e6, gt=0)
    stability_limit: float = Field(default=1.0, gt=0)
    control: ControlSpec = Field(default_factory=ControlSpec)
    target: CostTargetSpec = Field(default_factory=CostTargetSpec)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    thresholds: Thresholds = Field(default_factory=Thresholds)
    sweeps: List[SweepSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_resolution(self):
        """Grid must resolve products of modes and T must be a whole number of steps"""
        if self.grid_points < 4 * self.n_modes:
            raise ValueError(
                f"grid_points >= 4*n_modes violated: {self.grid_points} < {4 * self.n_modes}"
            )
        steps = self.T / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(f"T must be an integer multiple of dt: T={self.T}, dt={self.dt}")
        if self.control.spatial_modes > self.n_modes:
            raise ValueError(
                f"control.spatial_modes <= n_modes violated: {self.control.spatial_modes} > {self.n_modes}"
            )
        if self.h.kind == FieldKind.COSINE and 4 * self.h.mode > self.grid_points:
            raise ValueError(f"h mode {self.h.mode} is not resolved on M={self.grid_points}")
        return self
