"""
Time stepping for the Galerkin SDE

Two explicit schemes on a uniform grid:
- Ito Euler-Maruyama with the explicit 1/2 psi^2 DG_n(G_n) correction
- Stratonovich Heun (predictor-corrector on drift and diffusion, no correction)
The control is sampled at the left endpoint of each step.
"""
import logging
from typing import Optional

import numpy as np

from models.control import RealizedControl
from models.errors import BlowUpError, PathRefinementError
from models.fields import GalerkinState, VectorField
from models.simulation import Scheme, SimulationSetup
from models.trajectory import Trajectory, WienerPath
from services.dynamics import LlgDynamics
from services.fields import normalize_pointwise
from services.wiener import steps_for

logger = logging.getLogger(__name__)


class GalerkinIntegrator:
    """
    Integrates the truncated Galerkin system for one parameter set
    Uses dependency injection for the right-hand side
    """

    def __init__(self, dynamics: LlgDynamics, blowup_threshold: float = 1e6):
        """
        Initialize integrator

        Args:
            dynamics: Right-hand side of the Galerkin SDE
            blowup_threshold: L2 norm above which a path is aborted
        """
        self.dynamics = dynamics
        self.basis = dynamics.basis
        self.blowup_threshold = blowup_threshold
        logger.debug("Galerkin integrator initialized")

    # -- array-level steps --------------------------------------------------

    def _ito(self, c: np.ndarray, u_c: Optional[np.ndarray], dW: float, dt: float) -> np.ndarray:
        drift, noise, corr = self.dynamics.evaluate(c, u_c, with_correction=True)
        return c + (drift + 0.5 * corr) * dt + noise * dW

    def _heun(self, c: np.ndarray, u_c: Optional[np.ndarray], dW: float, dt: float) -> np.ndarray:
        drift, noise, _ = self.dynamics.evaluate(c, u_c, with_correction=False)
        predictor = c + drift * dt + noise * dW
        drift_p, noise_p, _ = self.dynamics.evaluate(predictor, u_c, with_correction=False)
        return c + 0.5 * (drift + drift_p) * dt + 0.5 * (noise + noise_p) * dW

    def _guard(self, c_new: np.ndarray, c_old: np.ndarray, step: int, time: float,
               threshold: Optional[float] = None) -> None:
        threshold = self.blowup_threshold if threshold is None else threshold
        if not np.all(np.isfinite(c_new)):
            raise BlowUpError(
                f"non-finite state at step {step} (t={time:.6g})", step, time, GalerkinState(c_old)
            )
        norm = float(np.sqrt(np.sum(c_new ** 2)))
        if norm > threshold:
            raise BlowUpError(
                f"L2 norm {norm:.3e} exceeds {threshold:.1e} at step {step} (t={time:.6g})",
                step, time, GalerkinState(c_old),
            )

    def _u_coefficients(self, u_slice: Optional[VectorField]) -> Optional[np.ndarray]:
        if u_slice is None:
            return None
        return self.basis.analysis @ u_slice.values

    # -- typed steps --------------------------------------------------------

    def step_ito(self, state: GalerkinState, u_slice: Optional[VectorField], dW: float, dt: float,
                 step_index: int = 0) -> GalerkinState:
        """
        One Euler-Maruyama step of the Ito form

        m + [drift + 1/2 psi^2 DG_n(G_n)] dt + psi P_n G(m) dW. The result
        already lies in H_n, so the re-projection is the identity.
        """
        c = state.coefficients
        c_new = self._ito(c, self._u_coefficients(u_slice), dW, dt)
        self._guard(c_new, c, step_index, (step_index + 1) * dt)
        return GalerkinState(c_new)

    def step_heun_stratonovich(self, state: GalerkinState, u_slice: Optional[VectorField], dW: float,
                               dt: float, step_index: int = 0) -> GalerkinState:
        """
        One Heun step of the Stratonovich form (no correction term)

        predictor m~ = m + a(m) dt + b(m) dW,
        corrector m+ = m + 1/2 (a(m) + a(m~)) dt + 1/2 (b(m) + b(m~)) dW.
        """
        c = state.coefficients
        c_new = self._heun(c, self._u_coefficients(u_slice), dW, dt)
        self._guard(c_new, c, step_index, (step_index + 1) * dt)
        return GalerkinState(c_new)

    # -- trajectories -------------------------------------------------------

    def stability_number(self, dt: float) -> float:
        """dt * lambda_{n-1}, the explicit-scheme stiffness indicator"""
        return float(dt * self.basis.eigenvalues[-1])

    def renormalize(self, c: np.ndarray) -> np.ndarray:
        """Pointwise m / |m| on the grid followed by projection"""
        grid = self.basis.eigenfunctions.T @ c
        return self.basis.analysis @ normalize_pointwise(grid)

    def integrate(self, setup: SimulationSetup, control: Optional[RealizedControl],
                  path: WienerPath) -> Trajectory:
        """
        Integrate one path over [0, T]

        Args:
            setup: Initial state, step, horizon, scheme and flags
            control: Realized control or None for u = 0
            path: Wiener increments with path.dt == setup.dt

        Returns:
            Trajectory with every step stored

        Raises:
            PathRefinementError: If the path does not cover [0, T] at setup.dt
            BlowUpError: With the last finite state when the path diverges
        """
        n_steps = steps_for(setup.horizon, setup.dt)
        if n_steps and (path.n_steps != n_steps or abs(path.dt - setup.dt) > 1e-15 * n_steps):
            raise PathRefinementError(
                f"path has {path.n_steps} steps of {path.dt}, setup needs {n_steps} of {setup.dt}"
            )

        stability = self.stability_number(setup.dt)
        if stability > setup.stability_limit:
            logger.warning(
                f"dt*lambda_(n-1) = {stability:.3g} exceeds {setup.stability_limit:g}; "
                f"explicit scheme may be unstable"
            )

        step = self._ito if setup.scheme == Scheme.ITO else self._heun
        u_windows = None
        if control is not None:
            u_windows = np.matmul(self.basis.analysis, control.window_values)

        dt = setup.dt
        c = np.array(setup.initial_state.coefficients)
        states = [setup.initial_state]
        increments = path.increments
        for i in range(n_steps):
            t = i * dt
            u_c = None if u_windows is None else u_windows[control.window_index(t)]
            c_new = step(c, u_c, increments[i], dt)
            if setup.renormalize:
                c_new = self.renormalize(c_new)
            self._guard(c_new, c, i, t + dt, setup.blowup_threshold)
            c = c_new
            states.append(GalerkinState(c))

        times = np.arange(n_steps + 1) * dt
        logger.debug(f"Integrated {n_steps} {setup.scheme.value} steps (seed {path.seed})")
        return Trajectory(times=times, states=states, path=path, config_snapshot=setup.summary())
