"""
SPSA minimization of the control cost

Simultaneous-perturbation stochastic approximation with gains
a_k = a / (k + 1 + A)^0.602 and c_k = c / (k + 1)^0.101, Rademacher
perturbations and optional greedy acceptance. With common random numbers
every evaluation reuses the same Wiener paths.
"""
import logging
import math
from typing import Optional

import numpy as np

from models.control import ControlParam, CostSpec, OptimizationResult, OptimizationStep
from models.errors import OptimizerError
from models.schemas import OptimizerConfig
from models.simulation import SimulationSetup
from services.control import CostEvaluator, admissibility_project
from services.wiener import mix_seed

logger = logging.getLogger(__name__)


class SpsaOptimizer:
    """
    Derivative-free search over a ControlParam family
    Uses dependency injection for the cost estimator
    """

    def __init__(self, evaluator: CostEvaluator, n_paths: int, master_seed: int):
        """
        Initialize optimizer

        Args:
            evaluator: Monte-Carlo cost estimator
            n_paths: Paths per cost evaluation
            master_seed: Ensemble seed of the cost evaluations
        """
        self.evaluator = evaluator
        self.n_paths = n_paths
        self.master_seed = master_seed

    def _cost(self, p: ControlParam, cost_spec: CostSpec, setup: SimulationSetup,
              crn: bool, evaluation: int) -> float:
        seed = self.master_seed if crn else mix_seed(self.master_seed, evaluation)
        report = self.evaluator.evaluate_cost(p, cost_spec, setup, self.n_paths, seed)
        return report.J

    @staticmethod
    def _mask(p: ControlParam, config: OptimizerConfig) -> np.ndarray:
        mask = np.ones_like(p.coefficients)
        if config.components is not None:
            mask[:] = 0.0
            mask[..., list(config.components)] = 1.0
        return mask

    def optimize(
        self,
        p0: ControlParam,
        cost_spec: CostSpec,
        setup: SimulationSetup,
        config: OptimizerConfig,
    ) -> OptimizationResult:
        """
        Minimize J over admissible parameters starting from p0

        Args:
            p0: Starting parameters (projected onto the admissible ball first)
            cost_spec: Target and terminal cost
            setup: Simulation setup of every evaluation
            config: Iterations, gains, exponents, seed and acceptance flags

        Returns:
            OptimizationResult with the best-seen parameters and the trace

        Raises:
            OptimizerError: If every path fails at the starting point
        """
        theta = admissibility_project(p0)
        evaluation = 0
        J_current = self._cost(theta, cost_spec, setup, config.crn, evaluation)
        if not math.isfinite(J_current):
            raise OptimizerError("cost at the starting point is not finite (all paths failed)")
        logger.info(f"SPSA start: J={J_current:.6g}, {config.iterations} iterations")

        initial_J = J_current
        best, best_J = theta, J_current
        mask = self._mask(theta, config)
        rng = np.random.Generator(np.random.PCG64(config.seed))
        scale = 1.0
        trace = []

        for k in range(config.iterations):
            a_k = config.a / (k + 1 + config.A) ** config.alpha_exponent
            c_k = scale * config.c / (k + 1) ** config.gamma_exponent
            delta = rng.choice([-1.0, 1.0], size=theta.coefficients.shape) * mask

            plus = admissibility_project(theta.with_coefficients(theta.coefficients + c_k * delta))
            minus = admissibility_project(theta.with_coefficients(theta.coefficients - c_k * delta))
            J_plus = self._cost(plus, cost_spec, setup, config.crn, evaluation + 1)
            J_minus = self._cost(minus, cost_spec, setup, config.crn, evaluation + 2)
            evaluation += 3

            J_candidate = None
            accepted = False
            if math.isfinite(J_plus) and math.isfinite(J_minus):
                gradient = (J_plus - J_minus) / (2.0 * c_k) * delta
                candidate = admissibility_project(
                    theta.with_coefficients(theta.coefficients - a_k * gradient)
                )
                J_candidate = self._cost(candidate, cost_spec, setup, config.crn, evaluation)
                if math.isfinite(J_candidate):
                    accepted = J_candidate <= J_current or not config.greedy
                    if accepted:
                        theta, J_current = candidate, J_candidate
                    if J_candidate < best_J:
                        best, best_J = candidate, J_candidate
            if J_candidate is None or not math.isfinite(J_candidate):
                scale *= 0.5
                J_candidate = None
                logger.warning(f"Iteration {k}: evaluation failed, perturbation scale now {scale:g}")

            trace.append(OptimizationStep(
                iteration=k,
                J=J_current,
                J_candidate=J_candidate,
                step_size=a_k,
                perturbation=c_k,
                accepted=accepted,
            ))
            logger.debug(
                f"Iteration {k}: J={J_current:.6g} candidate={J_candidate} a_k={a_k:.4g} c_k={c_k:.4g}"
            )

        logger.info(f"SPSA done: best J={best_J:.6g} (initial {initial_J:.6g})")
        return OptimizationResult(
            best_J=best_J,
            best_coefficients=best.coefficients.tolist(),
            horizon=best.horizon,
            radius=best.radius,
            initial_J=initial_J,
            trace=trace,
        )
