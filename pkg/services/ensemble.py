"""
Monte-Carlo ensembles over seeded Wiener paths

Paths are independent jobs. Results are stored by path index and reduced in
index order, so statistics do not depend on the worker count.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, TypeVar

import numpy as np

from models.control import RealizedControl
from models.errors import BlowUpError
from models.simulation import SimulationSetup
from models.trajectory import EnsembleStats, PathDiagnostics, Trajectory, WienerPath
from services.diagnostics import path_diagnostics, path_quantities
from services.dynamics import LlgDynamics
from services.integrators import GalerkinIntegrator
from services.wiener import path_for, steps_for

logger = logging.getLogger(__name__)

T = TypeVar("T")


class EnsembleRunner:
    """
    Runs one function per path index, optionally on a thread pool
    """

    def __init__(self, threads: int = 1):
        """
        Initialize runner

        Args:
            threads: Worker cap; 1 runs paths sequentially
        """
        self.threads = max(1, int(threads))

    def map_paths(self, job: Callable[[int], T], path_indices: Iterable[int]) -> Dict[int, T]:
        """
        Apply job to every path index

        Returns:
            Mapping path index -> result, iterable in ascending index order
        """
        indices = sorted(set(int(i) for i in path_indices))
        if self.threads == 1 or len(indices) == 1:
            results = [job(i) for i in indices]
        else:
            with ThreadPoolExecutor(max_workers=min(self.threads, len(indices))) as pool:
                results = list(pool.map(job, indices))
        return dict(zip(indices, results))

    def simulate_path(self, setup: SimulationSetup, control: Optional[RealizedControl],
                      master_seed: int, path_index: int,
                      integrator: Optional[GalerkinIntegrator] = None) -> Trajectory:
        """Integrate the path with index path_index of the ensemble master_seed"""
        integrator = integrator or GalerkinIntegrator(LlgDynamics(setup.params), setup.blowup_threshold)
        path = self.wiener_path(setup, master_seed, path_index)
        return integrator.integrate(setup, control, path)

    @staticmethod
    def wiener_path(setup: SimulationSetup, master_seed: int, path_index: int) -> WienerPath:
        return path_for(master_seed, path_index, steps_for(setup.horizon, setup.dt), setup.dt)

    def monte_carlo(
        self,
        setup: SimulationSetup,
        control: Optional[RealizedControl],
        n_paths: int,
        master_seed: int,
        path_indices: Optional[List[int]] = None,
        moment_order: float = 1.0,
    ) -> EnsembleStats:
        """
        Per-path diagnostics and ensemble means

        Args:
            setup: Simulation setup shared by every path
            control: Realized control or None
            n_paths: Number of paths (indices 0..n_paths-1 unless path_indices is given)
            master_seed: Seed the per-path seeds are derived from
            path_indices: Explicit path indices
            moment_order: p of the reported E[(sup_t |m|^2_{H1})^p]

        Returns:
            EnsembleStats over the successful paths with the failures listed
        """
        if n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {n_paths}")
        if moment_order < 1.0:
            raise ValueError(f"moment_order must be >= 1, got {moment_order}")
        indices = list(range(n_paths)) if path_indices is None else list(path_indices)

        basis = setup.params.basis
        integrator = GalerkinIntegrator(LlgDynamics(setup.params), setup.blowup_threshold)

        def job(index: int) -> PathDiagnostics:
            path = self.wiener_path(setup, master_seed, index)
            try:
                trajectory = integrator.integrate(setup, control, path)
            except BlowUpError as e:
                logger.warning(f"Path {index} failed: {e}")
                return PathDiagnostics(path_index=index, seed=path.seed, failed=True, failure_step=e.step)
            return path_diagnostics(path_quantities(trajectory, basis), index, path.seed)

        logger.info(f"Running {len(indices)} paths (master seed {master_seed}, threads {self.threads})")
        per_path = list(self.map_paths(job, indices).values())
        ok = [d for d in per_path if not d.failed]
        n_failed = len(per_path) - len(ok)
        if n_failed:
            logger.warning(f"{n_failed} of {len(per_path)} paths failed")

        def mean(attr: str, power: float = 1.0) -> Optional[float]:
            if not ok:
                return None
            return float(np.mean([getattr(d, attr) ** power for d in ok]))

        return EnsembleStats(
            n_paths=len(per_path),
            n_failed=n_failed,
            master_seed=master_seed,
            moment_order=moment_order,
            mean_sup_h1_squared=mean("sup_h1_squared"),
            mean_sup_h1_moment=mean("sup_h1_squared", moment_order),
            mean_integral_m_cross_lap_squared=mean("integral_m_cross_lap_squared"),
            mean_sphere_deviation=mean("max_sphere_deviation"),
            mean_integral_grad_l4_fourth=mean("integral_grad_l4_fourth"),
            mean_integral_a1_l2_squared=mean("integral_a1_l2_squared"),
            paths=per_path,
        )
