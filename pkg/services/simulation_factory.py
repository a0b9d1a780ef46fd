"""
Builds simulation objects and services from a validated RunConfig
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from models.control import ControlParam, CostSpec
from models.fields import Basis, VectorField
from models.params import LlgParams
from models.schemas import FieldKind, FieldSpec, InitialConditionSpec, InitialPreset, RunConfig
from models.simulation import Scheme, SimulationSetup
from services.control import CostEvaluator
from services.convergence import ConvergenceSweep
from services.diagnostics import InvariantChecker
from services.dynamics import LlgDynamics
from services.ensemble import EnsembleRunner
from services.fields import winding_field
from services.integrators import GalerkinIntegrator
from services.optimizer import SpsaOptimizer
from services.spectral import build_basis, project

logger = logging.getLogger(__name__)


def initial_field(spec: InitialConditionSpec, basis: Basis) -> VectorField:
    """Sphere-valued m0 of the preset on the basis grid"""
    if spec.preset == InitialPreset.WINDING:
        return winding_field(basis.grid, spec.amplitude)
    if spec.preset == InitialPreset.TILTED:
        direction = np.asarray(spec.vector, dtype=float)
        direction = direction / np.linalg.norm(direction)
    else:
        direction = np.array([0.0, 0.0, 1.0])
    return VectorField(np.tile(direction, (basis.grid_points + 1, 1)), constrained=True)


def noise_field(spec: FieldSpec, basis: Basis) -> VectorField:
    """h on the basis grid: constant, or vector * sqrt(2) cos(k pi x)"""
    vector = np.asarray(spec.vector, dtype=float)
    if spec.kind == FieldKind.COSINE:
        profile = np.sqrt(2.0) * np.cos(spec.mode * np.pi * basis.grid)
        return VectorField(profile[:, None] * vector[None, :])
    return VectorField.constant(vector, basis.grid_points)


def grid_for(config: RunConfig, n_modes: int) -> int:
    """Grid size for n_modes keeping the configured points-per-mode ratio"""
    if n_modes == config.n_modes:
        return config.grid_points
    return max(4 * n_modes, int(round(config.grid_points * n_modes / config.n_modes)))


def build_setup(
    config: RunConfig,
    n_modes: Optional[int] = None,
    dt: Optional[float] = None,
    alpha: Optional[float] = None,
    scheme: Optional[Scheme] = None,
) -> SimulationSetup:
    """
    Simulation setup of the config, optionally at another resolution

    Args:
        config: Validated run configuration
        n_modes: Mode count replacing config.n_modes
        dt: Step replacing config.dt
        alpha: Damping replacing config.alpha
        scheme: Scheme replacing config.scheme

    Returns:
        SimulationSetup with m_n(0) = P_n m0
    """
    n = n_modes or config.n_modes
    basis = build_basis(n, grid_for(config, n))
    params = LlgParams(
        alpha=alpha or config.alpha,
        h=noise_field(config.h, basis),
        basis=basis,
        cutoff_enabled=config.cutoff,
    )
    return SimulationSetup(
        params=params,
        initial_state=project(initial_field(config.m0, basis), basis),
        dt=dt or config.dt,
        horizon=config.T,
        scheme=scheme or config.scheme,
        renormalize=config.renormalize,
        blowup_threshold=config.blowup_threshold,
        stability_limit=config.stability_limit,
    )


def build_control(config: RunConfig) -> ControlParam:
    """Configured control, or zero coefficients of the configured family"""
    spec = config.control
    if spec.coefficients is None:
        return ControlParam.zeros(spec.time_windows, spec.spatial_modes, config.T, spec.radius)
    return ControlParam(np.array(spec.coefficients), config.T, spec.radius)


def precessing_target(vector, angular_velocity: float, grid_points: int) -> Callable[[float], VectorField]:
    """m_bar(t): vector rotated about the z axis by angular_velocity * t"""
    x, y, z = vector

    def target_at(t: float) -> VectorField:
        c, s = math.cos(angular_velocity * t), math.sin(angular_velocity * t)
        return VectorField.constant((c * x - s * y, s * x + c * y, z), grid_points)

    return target_at


def build_cost_spec(config: RunConfig, basis: Basis) -> CostSpec:
    spec = config.target
    target_path = None
    if spec.angular_velocity != 0.0:
        target_path = precessing_target(spec.vector, spec.angular_velocity, basis.grid_points)
    return CostSpec(target=VectorField.constant(spec.vector, basis.grid_points), target_path=target_path)


@dataclass
class SimulationServices:
    """Services of one run, wired for the configured resolution"""
    config: RunConfig
    setup: SimulationSetup
    integrator: GalerkinIntegrator
    runner: EnsembleRunner
    checker: InvariantChecker
    evaluator: CostEvaluator
    optimizer: SpsaOptimizer

    def sweep_for(self, alpha: Optional[float] = None) -> ConvergenceSweep:
        """Convergence sweep building its setups from the config, optionally at another damping"""
        def builder(n_modes: int, dt: float) -> SimulationSetup:
            return build_setup(self.config, n_modes=n_modes, dt=dt, alpha=alpha)

        return ConvergenceSweep(builder)


def create_services(config: RunConfig, threads: int = 1) -> SimulationServices:
    """
    Factory function creating all services with their dependencies

    Args:
        config: Validated run configuration
        threads: Worker cap for path-parallel work

    Returns:
        SimulationServices bundle
    """
    setup = build_setup(config)
    runner = EnsembleRunner(threads=threads)
    evaluator = CostEvaluator(runner=runner)
    services = SimulationServices(
        config=config,
        setup=setup,
        integrator=GalerkinIntegrator(LlgDynamics(setup.params), setup.blowup_threshold),
        runner=runner,
        checker=InvariantChecker(config.thresholds),
        evaluator=evaluator,
        optimizer=SpsaOptimizer(evaluator, n_paths=config.n_paths, master_seed=config.master_seed),
    )
    logger.info(f"Services created ({threads} thread(s))")
    return services
