"""
Trajectory diagnostics

Time series of the quantities bounded by the energy estimates, and the
pass/fail report built from them. Reports are pure functions of the
trajectory and thresholds and never raise on a breach.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from models.errors import GridMismatchError
from models.fields import Basis
from models.report import CheckResult, InvariantReport, Thresholds
from models.trajectory import PathDiagnostics, Trajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PathQuantities:
    """Per-time diagnostics of one trajectory, each of length n_times"""
    times: np.ndarray
    l2_squared: np.ndarray
    h1_squared: np.ndarray
    sphere_deviation: np.ndarray
    m_cross_lap_squared: np.ndarray
    grad_l4_fourth: np.ndarray
    a1_l2_squared: np.ndarray
    exchange_energy: np.ndarray
    identity_residual: np.ndarray

    def integral(self, series: np.ndarray) -> float:
        """Trapezoid integral over the trajectory times"""
        if len(self.times) < 2:
            return 0.0
        return float(trapezoid(series, self.times))


def path_quantities(trajectory: Trajectory, basis: Basis) -> PathQuantities:
    """
    Evaluate every diagnostic series along a trajectory

    Norms of coefficients use Parseval; pointwise quantities are formed on
    the grid and integrated with the trapezoid weights.

    Raises:
        GridMismatchError: If the trajectory has more modes than the basis
    """
    coefficients = trajectory.coefficient_array()
    n = coefficients.shape[1]
    if n > basis.n_modes:
        raise GridMismatchError(f"trajectory has {n} modes, basis has {basis.n_modes}")

    eigenvalues = basis.eigenvalues[:n]
    weights = basis.weights
    synthesis = basis.eigenfunctions[:n]
    derivative = basis.derivative_table[:n]

    squared = np.sum(coefficients ** 2, axis=2)  # (t, n)
    l2_sq = squared.sum(axis=1)
    h1_sq = squared @ (1.0 + eigenvalues)
    a1_sq = squared @ (1.0 + eigenvalues) ** 2
    energy = 0.5 * (squared @ eigenvalues)

    m = np.einsum("kj,tkd->tjd", synthesis, coefficients)
    grad = np.einsum("kj,tkd->tjd", derivative, coefficients)
    lap = np.einsum("kj,tkd->tjd", synthesis, -eigenvalues[None, :, None] * coefficients)

    lengths = np.linalg.norm(m, axis=2)
    sphere_dev = np.max(np.abs(lengths - 1.0), axis=1)

    m_lap = np.cross(m, lap)
    m_lap_sq = np.einsum("tjd,tjd->tj", m_lap, m_lap) @ weights
    grad_sq = np.einsum("tjd,tjd->tj", grad, grad)
    grad_l4 = (grad_sq ** 2) @ weights

    residual = np.cross(m, m_lap) + lap + grad_sq[:, :, None] * m
    identity = np.sqrt(np.einsum("tjd,tjd->tj", residual, residual) @ weights)

    return PathQuantities(
        times=np.asarray(trajectory.times, dtype=float),
        l2_squared=l2_sq,
        h1_squared=h1_sq,
        sphere_deviation=sphere_dev,
        m_cross_lap_squared=m_lap_sq,
        grad_l4_fourth=grad_l4,
        a1_l2_squared=a1_sq,
        exchange_energy=energy,
        identity_residual=identity,
    )


def path_diagnostics(quantities: PathQuantities, path_index: int, seed: int) -> PathDiagnostics:
    """Reduce the series of one successful path to its ensemble entries"""
    return PathDiagnostics(
        path_index=path_index,
        seed=seed,
        sup_h1_squared=float(np.max(quantities.h1_squared)),
        integral_m_cross_lap_squared=quantities.integral(quantities.m_cross_lap_squared),
        max_sphere_deviation=float(np.max(quantities.sphere_deviation)),
        integral_grad_l4_fourth=quantities.integral(quantities.grad_l4_fourth),
        integral_a1_l2_squared=quantities.integral(quantities.a1_l2_squared),
    )


class InvariantChecker:
    """
    Turns trajectory diagnostics into a report with pass flags
    """

    def __init__(self, thresholds: Thresholds = None):
        self.thresholds = thresholds or Thresholds()

    def check_trajectory(self, trajectory: Trajectory, basis: Basis,
                         thresholds: Thresholds = None) -> InvariantReport:
        """
        Compute every report field of one trajectory

        Args:
            trajectory: Finite trajectory
            basis: Basis the trajectory was computed on
            thresholds: Limits overriding the checker's defaults

        Returns:
            InvariantReport with values, thresholds and pass flags
        """
        limits = thresholds or self.thresholds
        q = path_quantities(trajectory, basis)

        l2_drift = float(np.max(np.abs(q.l2_squared - q.l2_squared[0])))
        sphere_dev = float(np.max(q.sphere_deviation))
        h1_sup = float(np.max(q.h1_squared))
        grad_l4 = q.integral(q.grad_l4_fourth)
        a1 = q.integral(q.a1_l2_squared)
        identity_max = float(np.max(q.identity_residual))

        measured = [
            ("l2_drift", l2_drift, limits.l2_drift),
            ("sphere_deviation", sphere_dev, limits.sphere_deviation),
            ("h1_sup", h1_sup, limits.h1_sup),
            ("regularity", grad_l4 + a1, limits.regularity),
            ("identity_residual", identity_max, limits.identity_residual),
        ]
        checks = [
            CheckResult(name=name, value=value, threshold=limit, passed=bool(value <= limit))
            for name, value, limit in measured
        ]
        failed = [c.name for c in checks if not c.passed]
        if failed:
            logger.warning(f"Invariant checks failed: {', '.join(failed)}")
        else:
            logger.info("All invariant checks passed")

        return InvariantReport(
            n_modes=trajectory.states[0].n_modes,
            grid_points=basis.grid_points,
            n_times=len(q.times),
            l2_drift=l2_drift,
            sphere_deviation=sphere_dev,
            h1_sup=h1_sup,
            grad_l4_integral=grad_l4,
            a1_integral=a1,
            initial_energy=float(q.exchange_energy[0]),
            energy_series=[float(e) for e in q.exchange_energy],
            identity_residual=[float(r) for r in q.identity_residual],
            checks=checks,
            passed=not failed,
        )
