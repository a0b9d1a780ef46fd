"""
Self-convergence studies on one common Wiener path

Every run of a sweep is driven by the same Brownian motion: the path is drawn
at the finest step and coarsened by block sums for the other steps.
"""
import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from models.control import RealizedControl
from models.errors import BlowUpError, PathRefinementError
from models.report import SweepAxis, SweepMetric, SweepRow, SweepTable
from models.simulation import Scheme, SimulationSetup
from models.trajectory import Trajectory, WienerPath
from services.diagnostics import path_quantities
from services.dynamics import LlgDynamics
from services.integrators import GalerkinIntegrator
from services.wiener import coarsen_path, path_for, refinement_factor, steps_for

logger = logging.getLogger(__name__)

# (n_modes, dt) -> setup; builds basis, parameters and initial state per resolution
SetupBuilder = Callable[[int, float], SimulationSetup]


def max_l2_distance(a: Trajectory, b: Trajectory, stride_a: int, stride_b: int) -> float:
    """
    max over shared times of |m_a - m_b|_{L2} in coefficient space

    stride_a and stride_b are the step sizes of a and b in units of the
    finest step; shared times are multiples of their least common multiple.
    Mode counts may differ; the shorter state is padded with zero modes.
    """
    shared = math.lcm(stride_a, stride_b)
    n = max(a.states[0].n_modes, b.states[0].n_modes)
    ca = a.coefficient_array()[:: shared // stride_a]
    cb = b.coefficient_array()[:: shared // stride_b]
    length = min(len(ca), len(cb))
    pa = np.zeros((length, n, 3))
    pb = np.zeros((length, n, 3))
    pa[:, : ca.shape[1]] = ca[:length]
    pb[:, : cb.shape[1]] = cb[:length]
    return float(np.max(np.sqrt(np.sum((pa - pb) ** 2, axis=(1, 2)))))


def l2_drift(trajectory: Trajectory) -> float:
    """max_t | |m(t)|^2_{L2} - |m(0)|^2_{L2} |"""
    squared = np.sum(trajectory.coefficient_array() ** 2, axis=(1, 2))
    return float(np.max(np.abs(squared - squared[0])))


def estimated_orders(values: Sequence[float], errors: Sequence[float], axis: SweepAxis) -> List[Optional[float]]:
    """
    Empirical orders by log-ratio of consecutive rows

    Resolution is 1/dt on the dt axis and n on the n_modes axis, so a
    positive order means the error falls as resolution grows.
    """
    orders: List[Optional[float]] = [None]
    for i in range(1, len(values)):
        r0 = 1.0 / values[i - 1] if axis == SweepAxis.DT else values[i - 1]
        r1 = 1.0 / values[i] if axis == SweepAxis.DT else values[i]
        e0, e1 = errors[i - 1], errors[i]
        if r0 == r1 or e0 <= 0.0 or e1 <= 0.0 or not (math.isfinite(e0) and math.isfinite(e1)):
            orders.append(None)
        else:
            orders.append(math.log(e0 / e1) / math.log(r1 / r0))
    return orders


def fitted_order(values: Sequence[float], errors: Sequence[float], axis: SweepAxis) -> Optional[float]:
    """Least-squares slope of log(error) against log(resolution) over rows with positive error"""
    points = [
        (math.log(1.0 / v if axis == SweepAxis.DT else v), math.log(e))
        for v, e in zip(values, errors)
        if e > 0.0 and math.isfinite(e)
    ]
    if len({x for x, _ in points}) < 2:
        return None
    x, y = np.array(points).T
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


class ConvergenceSweep:
    """
    Runs a family of simulations along one axis and tabulates errors
    """

    def __init__(self, build_setup: SetupBuilder):
        """
        Initialize sweep

        Args:
            build_setup: Factory producing the setup for a given (n_modes, dt)
        """
        self.build_setup = build_setup

    def _run(self, setup: SimulationSetup, path: WienerPath,
             control: Optional[RealizedControl]) -> Optional[Trajectory]:
        """Integrate one run; None when it blows up"""
        integrator = GalerkinIntegrator(LlgDynamics(setup.params), setup.blowup_threshold)
        try:
            return integrator.integrate(setup, control, path)
        except BlowUpError as e:
            logger.warning(
                f"Run n={setup.params.basis.n_modes}, dt={setup.dt:g} ({setup.scheme.value}) blew up "
                f"at step {e.step} (t={e.time:.4g}); row recorded as failed"
            )
            return None

    def convergence_sweep(
        self,
        axis: SweepAxis,
        values: Sequence[float],
        metric: SweepMetric,
        base_n_modes: int,
        base_dt: float,
        master_seed: int,
        n_paths: int = 1,
        paired_dt: Optional[Sequence[float]] = None,
        scheme: Scheme = Scheme.HEUN,
        control: Optional[RealizedControl] = None,
    ) -> SweepTable:
        """
        Errors per sweep value against the finest run

        Args:
            axis: dt or n_modes
            values: At least two sweep values
            metric: reference_error, scheme_distance, sphere_deviation or l2_drift
            base_n_modes: Mode count on the dt axis
            base_dt: Step on the n_modes axis when no paired steps are given
            master_seed: Ensemble seed the paths are derived from
            n_paths: Errors are averaged over this many paths
            paired_dt: One step per n_modes value
            scheme: Scheme of the reference_error and sphere_deviation runs
            control: Realized control shared by all runs

        Returns:
            SweepTable with rows (value, error, est_order) in the given order

        Raises:
            PathRefinementError: If a step is not an integer multiple of the finest
        """
        if len(values) < 2:
            raise ValueError(f"a sweep needs at least 2 values, got {len(values)}")
        if axis == SweepAxis.DT:
            resolutions = [(base_n_modes, float(v)) for v in values]
        else:
            if paired_dt is not None and len(paired_dt) != len(values):
                raise PathRefinementError(
                    f"{len(paired_dt)} paired steps for {len(values)} mode counts"
                )
            steps = paired_dt if paired_dt is not None else [base_dt] * len(values)
            resolutions = [(int(v), float(dt)) for v, dt in zip(values, steps)]

        finest_dt = min(dt for _, dt in resolutions)
        strides = [refinement_factor(dt, finest_dt) for _, dt in resolutions]
        setups = [self.build_setup(n, dt) for n, dt in resolutions]
        horizon = setups[0].horizon
        n_fine = steps_for(horizon, finest_dt)

        # finest resolution: smallest dt, then largest n
        reference = min(range(len(resolutions)), key=lambda i: (resolutions[i][1], -resolutions[i][0]))

        logger.info(
            f"Sweep over {axis.value} {list(values)} ({metric.value}, {n_paths} path(s), seed {master_seed})"
        )
        errors = np.zeros((n_paths, len(values)))
        for p in range(n_paths):
            fine_path = path_for(master_seed, p, n_fine, finest_dt)
            paths = [coarsen_path(fine_path, s) if n_fine else fine_path for s in strides]
            errors[p] = self._path_errors(metric, setups, paths, strides, reference, scheme, control)

        # a value fails when any of its paths failed; its mean error is then inf
        mean_errors = errors.mean(axis=0)
        failed = ~np.all(np.isfinite(errors), axis=0)
        orders = estimated_orders(values, mean_errors, axis)
        rows = [
            SweepRow(value=float(v), error=float(e), est_order=o, dt=dt, n_modes=n, failed=bool(f))
            for v, e, o, (n, dt), f in zip(values, mean_errors, orders, resolutions, failed)
        ]
        if failed.any():
            logger.warning(f"{int(failed.sum())} of {len(values)} sweep values failed")
        table = SweepTable(
            axis=axis,
            metric=metric,
            scheme=scheme.value,
            n_paths=n_paths,
            master_seed=master_seed,
            rows=rows,
            fitted_order=fitted_order(values, mean_errors, axis),
        )
        logger.info(f"Sweep done, fitted order {table.fitted_order}")
        return table

    def _path_errors(self, metric, setups, paths, strides, reference, scheme, control) -> List[float]:
        """Errors of one path; math.inf for every row whose runs blew up"""
        if metric == SweepMetric.SCHEME_DISTANCE:
            errors = []
            for setup, path in zip(setups, paths):
                heun = self._run(setup.with_scheme(Scheme.HEUN), path, control)
                ito = self._run(setup.with_scheme(Scheme.ITO), path, control)
                errors.append(math.inf if heun is None or ito is None else max_l2_distance(heun, ito, 1, 1))
            return errors

        runs = [self._run(setup.with_scheme(scheme), path, control) for setup, path in zip(setups, paths)]
        if metric == SweepMetric.SPHERE_DEVIATION:
            return [
                math.inf if run is None
                else float(np.max(path_quantities(run, setup.params.basis).sphere_deviation))
                for run, setup in zip(runs, setups)
            ]
        if metric == SweepMetric.L2_DRIFT:
            return [math.inf if run is None else l2_drift(run) for run in runs]
        ref = runs[reference]
        if ref is None:
            return [math.inf] * len(runs)
        return [
            math.inf if run is None else max_l2_distance(run, ref, s, strides[reference])
            for run, s in zip(runs, strides)
        ]
