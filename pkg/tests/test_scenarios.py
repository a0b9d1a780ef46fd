"""
End-to-end scenario tests through the config and service factory
"""
import pytest

from services.config_manager import ConfigManager
from services.simulation_factory import build_control, build_cost_spec, create_services


@pytest.mark.slow
class TestSwitchingScenario:
    """Optimized control steers the winding state toward the target"""

    def test_spsa_beats_zero_control(self):
        config = ConfigManager().resolve({"scenario": "switching"})
        services = create_services(config)
        setup = services.setup
        p0 = build_control(config)
        cost_spec = build_cost_spec(config, setup.params.basis)

        result = services.optimizer.optimize(p0, cost_spec, setup, config.optimizer)
        assert result.best_J <= 0.95 * result.initial_J, (
            f"best J={result.best_J} vs J(0)={result.initial_J}"
        )

        report = services.evaluator.evaluate_cost(
            result.best_param(), cost_spec, setup, config.n_paths, config.master_seed
        )
        assert report.J == pytest.approx(result.best_J, rel=1e-12)
        assert report.control <= config.control.radius * (1.0 + 1e-9)

    def test_uncontrolled_switching_run_passes_checks(self):
        config = ConfigManager().resolve({"scenario": "switching"})
        services = create_services(config)
        trajectory = services.runner.simulate_path(services.setup, None, config.master_seed, 0)
        report = services.checker.check_trajectory(trajectory, services.setup.params.basis)
        assert report.passed, [c for c in report.checks if not c.passed]
