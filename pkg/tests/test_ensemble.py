"""
Tests for Monte-Carlo ensembles
"""
import math

import numpy as np
import pytest

from models.fields import VectorField
from models.params import LlgParams
from models.simulation import SimulationSetup
from services.dynamics import LlgDynamics
from services.ensemble import EnsembleRunner
from services.integrators import GalerkinIntegrator
from services.spectral import build_basis, project
from tests.helpers import make_setup


class TestMapPaths:
    """Test suite for EnsembleRunner.map_paths"""

    def test_results_in_index_order(self):
        runner = EnsembleRunner(threads=4)
        results = runner.map_paths(lambda i: i * i, [5, 1, 3, 1])
        assert list(results) == [1, 3, 5]
        assert list(results.values()) == [1, 9, 25]

    def test_thread_count_is_clamped(self):
        assert EnsembleRunner(threads=0).threads == 1


class TestMonteCarlo:
    """Test suite for EnsembleRunner.monte_carlo"""

    @pytest.fixture
    def runner(self):
        return EnsembleRunner()

    def test_single_path_matches_direct_integration(self, runner, small_setup):
        stats = runner.monte_carlo(small_setup, None, n_paths=1, master_seed=12)
        trajectory = runner.simulate_path(small_setup, None, 12, 0)
        h1 = [np.sum(s.coefficients ** 2 * (1.0 + small_setup.params.basis.eigenvalues[:, None]))
              for s in trajectory.states]
        assert stats.n_paths == 1
        assert stats.n_failed == 0
        assert stats.mean_sup_h1_squared == pytest.approx(max(h1), rel=1e-12)

    def test_deterministic_constant_state(self, runner):
        basis = build_basis(4, 16)
        setup = SimulationSetup(
            params=LlgParams.with_constant_h(basis, h=(0.0, 0.0, 0.0)),
            initial_state=project(VectorField.constant((0.0, 0.0, 1.0), 16), basis),
            dt=1e-3,
            horizon=0.05,
        )
        stats = runner.monte_carlo(setup, None, n_paths=3, master_seed=1)
        assert stats.mean_sup_h1_squared == pytest.approx(1.0, abs=1e-12)
        assert stats.mean_sphere_deviation == pytest.approx(0.0, abs=1e-12)

    def test_permutation_invariance(self, runner, small_setup):
        forward = runner.monte_carlo(small_setup, None, 4, 77, path_indices=[0, 1, 2, 3])
        backward = runner.monte_carlo(small_setup, None, 4, 77, path_indices=[3, 2, 1, 0])
        assert forward.model_dump() == backward.model_dump()

    def test_worker_count_does_not_change_statistics(self, small_setup):
        serial = EnsembleRunner(threads=1).monte_carlo(small_setup, None, 6, 2024)
        threaded = EnsembleRunner(threads=3).monte_carlo(small_setup, None, 6, 2024)
        assert serial.model_dump() == threaded.model_dump()

    def test_paths_are_independent_of_ensemble_size(self, runner, small_setup):
        two = runner.monte_carlo(small_setup, None, 2, 5)
        four = runner.monte_carlo(small_setup, None, 4, 5)
        assert two.paths == four.paths[:2]

    def test_moment_order(self, runner, small_setup):
        stats = runner.monte_carlo(small_setup, None, 3, 8, moment_order=2.0)
        squares = [p.sup_h1_squared ** 2 for p in stats.paths]
        assert stats.mean_sup_h1_moment == pytest.approx(float(np.mean(squares)), rel=1e-12)

    def test_all_paths_failed(self, runner):
        setup = make_setup(blowup_threshold=1e-3)
        stats = runner.monte_carlo(setup, None, 3, 1)
        assert stats.n_failed == 3
        assert stats.mean_sup_h1_squared is None
        assert all(p.failed and p.failure_step == 0 for p in stats.paths)

    @pytest.mark.parametrize("n_paths,moment_order", [(0, 1.0), (2, 0.5)])
    def test_invalid_arguments(self, runner, small_setup, n_paths, moment_order):
        with pytest.raises(ValueError):
            runner.monte_carlo(small_setup, None, n_paths, 1, moment_order=moment_order)

    def test_simulate_path_reuses_injected_integrator(self, runner, small_setup):
        integrator = GalerkinIntegrator(LlgDynamics(small_setup.params))
        a = runner.simulate_path(small_setup, None, 3, 1, integrator)
        b = runner.simulate_path(small_setup, None, 3, 1)
        assert np.array_equal(a.coefficient_array(), b.coefficient_array())


@pytest.mark.slow
class TestUniformEnergyBounds:
    """Ensemble energies stay bounded uniformly in the number of modes"""

    def test_bounds_uniform_in_n(self):
        runner = EnsembleRunner()
        pairs = [(4, 4e-3), (8, 1e-3), (16, 2.5e-4), (32, 6.25e-5)]
        stats = [
            runner.monte_carlo(make_setup(n_modes=n, dt=dt, horizon=0.1), None, 32, 2024)
            for n, dt in pairs
        ]
        assert all(s.n_failed == 0 for s in stats)

        sup_h1 = [s.mean_sup_h1_squared for s in stats]
        regularity = [s.mean_integral_grad_l4_fourth + s.mean_integral_a1_l2_squared for s in stats]
        cross_lap = [s.mean_integral_m_cross_lap_squared for s in stats]
        assert max(sup_h1) <= 2.0 * min(sup_h1), f"sup H1 not uniform: {sup_h1}"
        assert max(regularity) <= 3.0 * min(regularity), f"Regularity not uniform: {regularity}"
        assert max(cross_lap) <= 3.0 * min(cross_lap)
        assert sup_h1[0] >= 1.0 + (math.pi / 2) ** 2 * math.pi ** 2 / 2 * 0.5
