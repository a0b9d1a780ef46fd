"""
Tests for the Galerkin time steppers
"""
import logging

import numpy as np
import pytest

from models.control import ControlParam
from models.errors import BlowUpError, PathRefinementError
from models.fields import GalerkinState, VectorField
from models.params import LlgParams
from models.simulation import Scheme, SimulationSetup
from models.trajectory import WienerPath
from services.control import realize_control
from services.dynamics import LlgDynamics
from services.fields import sphere_deviation
from services.integrators import GalerkinIntegrator
from services.spectral import build_basis, project, synthesize
from services.wiener import coarsen_path, path_for
from tests.helpers import make_setup


def _integrator(setup: SimulationSetup) -> GalerkinIntegrator:
    return GalerkinIntegrator(LlgDynamics(setup.params), setup.blowup_threshold)


def _single_mode_setup(dt=1e-2, horizon=1.0, renormalize=False, alpha=0.1):
    basis = build_basis(1, 4)
    params = LlgParams.with_constant_h(basis, alpha=alpha, h=(0.0, 0.0, 1.0))
    return SimulationSetup(
        params=params,
        initial_state=GalerkinState([[1.0, 0.0, 0.0]]),
        dt=dt,
        horizon=horizon,
        renormalize=renormalize,
    )


class TestSteps:
    """Test suite for single Ito and Heun steps"""

    @pytest.fixture
    def integrator(self, small_setup):
        return _integrator(small_setup)

    def test_fixed_point_without_noise(self):
        setup = make_setup(h=(0.0, 0.0, 0.0))
        integrator = _integrator(setup)
        state = project(VectorField.constant((0.0, 0.0, 1.0), 16), setup.params.basis)
        for step in (integrator.step_ito, integrator.step_heun_stratonovich):
            result = step(state, None, 0.05, 1e-3)
            assert np.array_equal(result.coefficients, state.coefficients)

    def test_ito_step_is_affine_in_increment(self, small_setup, integrator):
        state = small_setup.initial_state
        base = integrator.step_ito(state, None, 0.0, 1e-3).coefficients
        moved = integrator.step_ito(state, None, 0.02, 1e-3).coefficients
        noise = integrator.dynamics.noise_coefficient(state).coefficients
        assert np.allclose(moved - base, 0.02 * noise, atol=1e-14)

    def test_single_mode_ito_oracle(self):
        alpha, dt, dW = 0.1, 1e-3, 0.03
        setup = _single_mode_setup(alpha=alpha)
        integrator = _integrator(setup)
        m = np.array([1.0, 0.0, 0.0])
        h = np.array([0.0, 0.0, 1.0])

        mh = np.cross(m, h)
        g = mh - alpha * np.cross(m, mh)
        gh = np.cross(g, h)
        dg = gh - alpha * (np.cross(m, gh) + np.cross(g, mh))
        expected = m + 0.5 * dg * dt + g * dW

        result = integrator.step_ito(GalerkinState([m]), None, dW, dt).coefficients[0]
        assert np.allclose(result, expected, atol=1e-14)

    def test_heun_single_mode_sphere_error_shrinks(self):
        deviations = {}
        for dt in (1e-2, 2.5e-3):
            setup = _single_mode_setup(dt=dt)
            integrator = _integrator(setup)
            values = []
            for index in range(4):
                fine = path_for(17, index, 400, 2.5e-3)
                path = coarsen_path(fine, int(round(dt / 2.5e-3)))
                trajectory = integrator.integrate(setup, None, path)
                values.append(abs(np.linalg.norm(trajectory.final_state.coefficients[0]) - 1.0))
            deviations[dt] = float(np.mean(values))
        assert deviations[2.5e-3] <= 0.5 * deviations[1e-2]

    def test_blow_up_keeps_last_finite_state(self, small_setup, integrator):
        state = GalerkinState(np.full((4, 3), 1e300))
        with pytest.raises(BlowUpError) as info:
            integrator.step_ito(state, None, 0.0, 1e-3, step_index=7)
        assert info.value.step == 7
        assert np.all(np.isfinite(info.value.last_state.coefficients))


class TestIntegrate:
    """Test suite for whole trajectories"""

    def test_zero_horizon_returns_initial_state(self):
        setup = make_setup(horizon=0.0)
        trajectory = _integrator(setup).integrate(setup, None, path_for(1, 0, 0, setup.dt))
        assert len(trajectory.states) == 1
        assert np.array_equal(trajectory.final_state.coefficients, setup.initial_state.coefficients)

    def test_reproducible(self, small_setup):
        integrator = _integrator(small_setup)
        path = path_for(3, 0, 100, small_setup.dt)
        a = integrator.integrate(small_setup, None, path).coefficient_array()
        b = integrator.integrate(small_setup, None, path).coefficient_array()
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("scheme", [Scheme.ITO, Scheme.HEUN])
    def test_time_grid_and_snapshot(self, small_setup, scheme):
        setup = small_setup.with_scheme(scheme)
        trajectory = _integrator(setup).integrate(setup, None, path_for(3, 0, 100, setup.dt))
        assert len(trajectory.states) == 101
        assert trajectory.times[-1] == pytest.approx(0.1)
        assert trajectory.config_snapshot["scheme"] == scheme.value

    def test_path_length_mismatch(self, small_setup):
        with pytest.raises(PathRefinementError):
            _integrator(small_setup).integrate(small_setup, None, path_for(3, 0, 50, small_setup.dt))

    def test_path_step_mismatch(self, small_setup):
        path = WienerPath(dt=2e-3, increments=np.zeros(100), seed=0)
        with pytest.raises(PathRefinementError):
            _integrator(small_setup).integrate(small_setup, None, path)

    def test_stability_warning(self, caplog):
        setup = make_setup(n_modes=8, dt=4e-3, horizon=4e-3)
        with caplog.at_level(logging.WARNING):
            _integrator(setup).integrate(setup, None, path_for(1, 0, 1, setup.dt))
        assert "may be unstable" in caplog.text

    def test_blow_up_threshold_from_setup(self):
        setup = make_setup(blowup_threshold=1e-3)
        with pytest.raises(BlowUpError) as info:
            _integrator(setup).integrate(setup, None, path_for(1, 0, 100, setup.dt))
        assert info.value.step == 0
        assert info.value.last_state is not None

    def test_renormalization_keeps_single_mode_on_sphere(self):
        plain = _single_mode_setup(dt=1e-2)
        renormalized = _single_mode_setup(dt=1e-2, renormalize=True)
        path = path_for(5, 0, 100, 1e-2)
        drift_plain = abs(np.linalg.norm(_integrator(plain).integrate(plain, None, path).final_state.coefficients) - 1.0)
        trajectory = _integrator(renormalized).integrate(renormalized, None, path)
        field = synthesize(trajectory.final_state, renormalized.params.basis)
        assert sphere_deviation(field) <= 1e-12
        assert drift_plain > 1e-8

    def test_control_is_sampled_per_window(self):
        setup = make_setup(dt=1e-3, horizon=0.1)
        basis = setup.params.basis
        coefficients = np.zeros((2, 1, 3))
        coefficients[1, 0] = (0.0, 5.0, 0.0)
        control = realize_control(ControlParam(coefficients, horizon=0.1), basis)
        integrator = _integrator(setup)
        path = path_for(9, 0, 100, setup.dt)

        free = integrator.integrate(setup, None, path).coefficient_array()
        controlled = integrator.integrate(setup, control, path).coefficient_array()
        assert np.array_equal(free[:51], controlled[:51]), "Second-window control acted early"
        assert not np.array_equal(free[52], controlled[52])
