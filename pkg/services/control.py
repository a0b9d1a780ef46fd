"""
Control realization, admissibility and Monte-Carlo cost evaluation
"""
import itertools
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.integrate import trapezoid

from models.control import ControlParam, CostReport, CostSpec, RealizedControl
from models.errors import BlowUpError, GridMismatchError
from models.fields import Basis
from models.simulation import SimulationSetup
from models.trajectory import Trajectory
from services.dynamics import LlgDynamics
from services.ensemble import EnsembleRunner
from services.fields import pointwise_inner
from services.integrators import GalerkinIntegrator

logger = logging.getLogger(__name__)


def realize_control(p: ControlParam, basis: Basis) -> RealizedControl:
    """
    Sample u(t, .) = sum_k c_jk e_k on the grid for every time window j

    Raises:
        GridMismatchError: If J_x exceeds the number of basis modes
    """
    if p.spatial_modes > basis.n_modes:
        raise GridMismatchError(
            f"control uses {p.spatial_modes} spatial modes, basis has {basis.n_modes}"
        )
    modes = basis.eigenfunctions[: p.spatial_modes]
    window_values = np.einsum("kx,jkd->jxd", modes, p.coefficients)
    return RealizedControl(window_values=window_values, horizon=p.horizon)


def control_energy(p: ControlParam) -> float:
    """Closed form of the integral of |u|^2_{L2} over [0, T]: sum |c_jk|^2 T / J_t"""
    return float(np.sum(p.coefficients ** 2) * p.horizon / p.time_windows)


def control_term(control: RealizedControl, basis: Basis) -> float:
    """Integral of |u|^2_{L2} by spatial quadrature, exact in time over the windows"""
    per_window = np.einsum("jxd,jxd->jx", control.window_values, control.window_values) @ basis.weights
    return float(np.sum(per_window) * control.horizon / control.time_windows)


def admissibility_project(p: ControlParam) -> ControlParam:
    """
    Scale the coefficients onto the admissible ball of radius K

    Identity when the control energy is at most K; otherwise a uniform scaling
    by (K / energy)^(1/2).
    """
    energy = control_energy(p)
    if energy <= p.radius:
        return p
    factor = np.sqrt(p.radius / energy)
    logger.debug(f"Control energy {energy:.4g} above K={p.radius:g}, scaling by {factor:.4g}")
    return p.with_coefficients(p.coefficients * factor)


class CostEvaluator:
    """
    Monte-Carlo estimator of the control cost J
    Uses dependency injection for the path runner
    """

    def __init__(self, runner: Optional[EnsembleRunner] = None):
        self.runner = runner or EnsembleRunner()

    @staticmethod
    def path_costs(trajectory: Trajectory, cost_spec: CostSpec, basis: Basis) -> Tuple[float, float]:
        """
        Tracking and terminal cost of one trajectory

        tracking = int_0^T |m - m_bar|^2_{H1} dt by the trapezoid rule in time,
        terminal = |m(T) - m_bar(T)|^2_{L2}.
        """
        coefficients = trajectory.coefficient_array()
        n = coefficients.shape[1]
        targets = cost_spec.targets_at(trajectory.times)
        target_coefficients = np.einsum("kx,txd->tkd", basis.analysis[:n], targets)

        m = np.einsum("kx,tkd->txd", basis.eigenfunctions[:n], coefficients)
        diff = m - targets
        l2_sq = np.einsum("txd,txd->tx", diff, diff) @ basis.weights
        grad = np.einsum("kx,tkd->txd", basis.derivative_table[:n], coefficients - target_coefficients)
        grad_sq = np.einsum("txd,txd->tx", grad, grad) @ basis.weights
        h1_sq = l2_sq + grad_sq

        tracking = float(trapezoid(h1_sq, trajectory.times)) if len(h1_sq) > 1 else 0.0
        terminal = float(l2_sq[-1])
        return tracking, terminal

    def evaluate_cost(
        self,
        p: ControlParam,
        cost_spec: CostSpec,
        setup: SimulationSetup,
        n_paths: int,
        master_seed: int,
        path_indices: Optional[Sequence[int]] = None,
    ) -> CostReport:
        """
        Estimate J(p) = E[tracking + terminal] + control energy

        Args:
            p: Control parameters (used as given, not projected)
            cost_spec: Target and terminal cost
            setup: Simulation setup; its horizon must match p
            n_paths: Number of seeded paths
            master_seed: Ensemble seed
            path_indices: Explicit path indices

        Returns:
            CostReport; blown-up paths are excluded and listed, J is inf when all fail

        Raises:
            GridMismatchError: If the target is not on the simulation grid
            ValueError: If no paths are requested or the horizons differ
        """
        basis = setup.params.basis
        if cost_spec.target.grid_size != basis.grid_points:
            raise GridMismatchError(
                f"target sampled on M={cost_spec.target.grid_size}, simulation grid is M={basis.grid_points}"
            )
        if abs(p.horizon - setup.horizon) > 1e-12:
            raise ValueError(f"control horizon {p.horizon} differs from simulation horizon {setup.horizon}")

        indices = list(range(n_paths)) if path_indices is None else list(path_indices)
        if not indices:
            raise ValueError(f"cost needs at least 1 path, got n_paths={n_paths}")
        control = realize_control(p, basis)
        integrator = GalerkinIntegrator(LlgDynamics(setup.params), setup.blowup_threshold)

        def job(index: int) -> Optional[Tuple[float, float]]:
            try:
                trajectory = self.runner.simulate_path(setup, control, master_seed, index, integrator)
            except BlowUpError as e:
                logger.warning(f"Cost path {index} failed: {e}")
                return None
            return self.path_costs(trajectory, cost_spec, basis)

        results = self.runner.map_paths(job, indices)
        failed = [i for i, r in results.items() if r is None]
        ok = np.array([r for r in results.values() if r is not None]).reshape(-1, 2)

        control_value = control_energy(p)
        if len(ok) == 0:
            logger.warning(f"All {len(results)} cost paths failed")
            tracking = terminal = float("inf")
            standard_error = float("inf")
        else:
            tracking = float(np.mean(ok[:, 0]))
            terminal = float(np.mean(ok[:, 1]))
            totals = ok.sum(axis=1)
            standard_error = float(np.std(totals, ddof=1) / np.sqrt(len(totals))) if len(totals) > 1 else 0.0

        return CostReport(
            J=tracking + control_value + terminal,
            tracking=tracking,
            control=control_value,
            terminal=terminal,
            n_paths=len(results),
            n_failed=len(failed),
            master_seed=master_seed,
            standard_error=standard_error,
            failed_paths=failed,
        )


class GridSearchResult(BaseModel):
    """Brute-force minimum over a 2-parameter control family"""
    best_J: float
    best_point: List[float]
    axes: List[Tuple[int, int, int]]
    n_evaluations: int


def grid_search(
    evaluator: CostEvaluator,
    base: ControlParam,
    axes: Sequence[Tuple[int, int, int]],
    values: Sequence[float],
    cost_spec: CostSpec,
    setup: SimulationSetup,
    n_paths: int,
    master_seed: int,
) -> GridSearchResult:
    """
    Evaluate J on the full tensor grid of `values` along the given coefficients

    Args:
        evaluator: Cost estimator
        base: Parameters supplying the coefficients off the family
        axes: (window j, mode k, component d) of each free coefficient
        values: Grid values shared by every axis
        cost_spec, setup, n_paths, master_seed: As for evaluate_cost

    Returns:
        GridSearchResult with the best admissible point
    """
    best_J = float("inf")
    best_point: List[float] = []
    count = 0
    for point in itertools.product(values, repeat=len(axes)):
        coefficients = np.array(base.coefficients)
        for (j, k, d), value in zip(axes, point):
            coefficients[j, k, d] = value
        candidate = admissibility_project(base.with_coefficients(coefficients))
        J = evaluator.evaluate_cost(candidate, cost_spec, setup, n_paths, master_seed).J
        count += 1
        if J < best_J:
            best_J, best_point = J, [float(v) for v in point]
    logger.info(f"Grid search over {count} points: best J={best_J:.6g} at {best_point}")
    return GridSearchResult(best_J=best_J, best_point=best_point, axes=list(axes), n_evaluations=count)
