"""
Invariant reports and convergence tables
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field


class Thresholds(BaseModel):
    """Pass/fail limits of the trajectory checks"""
    l2_drift: float = Field(default=1e-2, gt=0)
    sphere_deviation: float = Field(default=0.25, gt=0)
    h1_sup: float = Field(default=1e4, gt=0)
    regularity: float = Field(default=1e8, gt=0)
    identity_residual: float = Field(default=0.1, gt=0)


class CheckResult(BaseModel):
    """One check: measured value against its recorded threshold"""
    name: str
    value: float
    threshold: float
    passed: bool


class InvariantReport(BaseModel):
    """
    Diagnostics of one trajectory

    l2_drift is max_t | |m(t)|^2_{L2} - |m(0)|^2_{L2} |; the two regularity
    integrals are the time integrals of |grad m|^4_{L4} and |A_1 m|^2_{L2}.
    """
    n_modes: int
    grid_points: int
    n_times: int
    l2_drift: float
    sphere_deviation: float
    h1_sup: float
    grad_l4_integral: float
    a1_integral: float
    initial_energy: float
    energy_series: List[float]
    identity_residual: List[float]
    checks: List[CheckResult]
    passed: bool


class SweepAxis(str, Enum):
    """Parameter varied by a convergence sweep"""
    DT = "dt"
    N_MODES = "n_modes"


class SweepMetric(str, Enum):
    """Error measured per sweep value"""
    REFERENCE_ERROR = "reference_error"
    SCHEME_DISTANCE = "scheme_distance"
    SPHERE_DEVIATION = "sphere_deviation"
    L2_DRIFT = "l2_drift"


class SweepRow(BaseModel):
    value: float
    error: float
    est_order: Optional[float] = None
    dt: float
    n_modes: int
    failed: bool = False


class SweepTable(BaseModel):
    """Ordered error table of one sweep, averaged over its paths"""
    axis: SweepAxis
    metric: SweepMetric
    scheme: str
    n_paths: int
    master_seed: int
    rows: List[SweepRow]
    fitted_order: Optional[float] = None
