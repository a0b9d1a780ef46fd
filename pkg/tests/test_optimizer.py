"""
Tests for the SPSA optimizer
"""
import math
from unittest.mock import Mock

import numpy as np
import pytest

from models.control import ControlParam, CostReport, CostSpec
from models.errors import OptimizerError
from models.fields import VectorField
from models.params import LlgParams
from models.schemas import OptimizerConfig
from models.simulation import SimulationSetup
from services.control import CostEvaluator, grid_search
from services.optimizer import SpsaOptimizer
from services.spectral import build_basis, project
from tests.helpers import make_setup


def _report(J):
    return CostReport(J=J, tracking=J, control=0.0, terminal=0.0, n_paths=1, master_seed=0)


def _up_target(grid_points):
    return CostSpec(VectorField.constant((0.0, 0.0, 1.0), grid_points))


class TestSpsaMechanics:
    """Test suite for SPSA bookkeeping with a mocked cost"""

    @pytest.fixture
    def setup(self):
        return make_setup(n_modes=2, dt=1e-2, horizon=0.1)

    def test_zero_iterations_return_start(self, setup):
        evaluator = Mock(spec=CostEvaluator)
        evaluator.evaluate_cost.return_value = _report(2.5)
        p0 = ControlParam.zeros(2, 1, 0.1)
        result = SpsaOptimizer(evaluator, 4, 7).optimize(p0, _up_target(8), setup, OptimizerConfig(iterations=0))
        assert result.best_J == result.initial_J == 2.5
        assert result.trace == []
        assert np.array_equal(result.best_param().coefficients, p0.coefficients)
        evaluator.evaluate_cost.assert_called_once()

    def test_non_finite_start_raises(self, setup):
        evaluator = Mock(spec=CostEvaluator)
        evaluator.evaluate_cost.return_value = _report(math.inf)
        with pytest.raises(OptimizerError):
            SpsaOptimizer(evaluator, 4, 7).optimize(
                ControlParam.zeros(2, 1, 0.1), _up_target(8), setup, OptimizerConfig(iterations=3)
            )

    def test_failed_perturbation_halves_scale(self, setup):
        evaluator = Mock(spec=CostEvaluator)
        evaluator.evaluate_cost.side_effect = [
            _report(1.0),
            _report(math.inf), _report(1.0),
            _report(1.2), _report(0.8), _report(0.9),
        ]
        config = OptimizerConfig(iterations=2, c=0.2)
        result = SpsaOptimizer(evaluator, 1, 0).optimize(ControlParam.zeros(2, 1, 0.1), _up_target(8), setup, config)

        first, second = result.trace
        assert first.J_candidate is None
        assert not first.accepted
        assert first.perturbation == pytest.approx(0.2)
        assert second.perturbation == pytest.approx(0.5 * 0.2 / 2 ** 0.101)
        assert second.accepted
        assert result.best_J == pytest.approx(0.9)

    def test_greedy_rejects_worse_candidate(self, setup):
        evaluator = Mock(spec=CostEvaluator)
        evaluator.evaluate_cost.side_effect = [_report(1.0), _report(1.1), _report(0.9), _report(1.5)]
        result = SpsaOptimizer(evaluator, 1, 0).optimize(
            ControlParam.zeros(2, 1, 0.1), _up_target(8), setup, OptimizerConfig(iterations=1)
        )
        step = result.trace[0]
        assert step.J_candidate == 1.5
        assert not step.accepted
        assert step.J == 1.0
        assert result.best_J == 1.0

    def test_non_greedy_accepts_worse_candidate(self, setup):
        evaluator = Mock(spec=CostEvaluator)
        evaluator.evaluate_cost.side_effect = [_report(1.0), _report(1.1), _report(0.9), _report(1.5)]
        result = SpsaOptimizer(evaluator, 1, 0).optimize(
            ControlParam.zeros(2, 1, 0.1), _up_target(8), setup, OptimizerConfig(iterations=1, greedy=False)
        )
        assert result.trace[0].accepted
        assert result.trace[0].J == 1.5
        assert result.best_J == 1.0

    def test_common_random_numbers_reuse_seed(self, setup):
        evaluator = Mock(spec=CostEvaluator)
        evaluator.evaluate_cost.return_value = _report(1.0)
        SpsaOptimizer(evaluator, 3, 42).optimize(
            ControlParam.zeros(2, 1, 0.1), _up_target(8), setup, OptimizerConfig(iterations=2)
        )
        seeds = {call.args[4] for call in evaluator.evaluate_cost.call_args_list}
        assert seeds == {42}

    def test_fresh_seeds_without_common_random_numbers(self, setup):
        evaluator = Mock(spec=CostEvaluator)
        evaluator.evaluate_cost.return_value = _report(1.0)
        SpsaOptimizer(evaluator, 3, 42).optimize(
            ControlParam.zeros(2, 1, 0.1), _up_target(8), setup, OptimizerConfig(iterations=2, crn=False)
        )
        seeds = [call.args[4] for call in evaluator.evaluate_cost.call_args_list]
        assert len(set(seeds)) == len(seeds)

    def test_component_mask(self, setup):
        evaluator = Mock(spec=CostEvaluator)
        evaluator.evaluate_cost.return_value = _report(1.0)
        SpsaOptimizer(evaluator, 1, 0).optimize(
            ControlParam.zeros(2, 1, 0.1), _up_target(8), setup, OptimizerConfig(iterations=2, components=[1])
        )
        for call in evaluator.evaluate_cost.call_args_list:
            coefficients = call.args[0].coefficients
            assert np.all(coefficients[..., [0, 2]] == 0.0)

    def test_candidates_are_admissible(self, setup):
        evaluator = Mock(spec=CostEvaluator)
        evaluator.evaluate_cost.return_value = _report(1.0)
        config = OptimizerConfig(iterations=3, c=50.0)
        SpsaOptimizer(evaluator, 1, 0).optimize(ControlParam.zeros(2, 1, 0.1, radius=1.0), _up_target(8), setup, config)
        for call in evaluator.evaluate_cost.call_args_list:
            p = call.args[0]
            assert np.sum(p.coefficients ** 2) * p.horizon / p.time_windows <= 1.0 + 1e-9


class TestSpsaOnSimulations:
    """SPSA driven by Monte-Carlo cost estimates"""

    def test_greedy_trace_is_monotone(self):
        setup = make_setup(n_modes=2, dt=1e-2, horizon=0.2)
        optimizer = SpsaOptimizer(CostEvaluator(), 2, 5)
        result = optimizer.optimize(
            ControlParam.zeros(2, 1, 0.2), _up_target(8), setup, OptimizerConfig(iterations=5)
        )
        values = [result.initial_J] + [step.J for step in result.trace]
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert result.best_J <= result.initial_J

    def test_all_paths_failing_at_start(self):
        setup = make_setup(n_modes=2, dt=1e-2, horizon=0.1, blowup_threshold=1e-3)
        with pytest.raises(OptimizerError):
            SpsaOptimizer(CostEvaluator(), 2, 0).optimize(
                ControlParam.zeros(2, 1, 0.1), _up_target(8), setup, OptimizerConfig(iterations=2)
            )


@pytest.mark.slow
class TestSpsaAgainstGrid:
    """SPSA reaches the brute-force optimum of a two-parameter family"""

    def test_matches_grid_minimum(self):
        basis = build_basis(2, 8)
        tilted = VectorField.constant((1.0, 0.0, 0.0), 8)
        setup = SimulationSetup(
            params=LlgParams.with_constant_h(basis, h=(0.0, 0.0, 0.0)),
            initial_state=project(tilted, basis),
            dt=1e-2,
            horizon=0.5,
        )
        base = ControlParam.zeros(2, 1, 0.5)
        target = _up_target(8)
        evaluator = CostEvaluator()

        grid = grid_search(
            evaluator, base, [(0, 0, 1), (1, 0, 1)], list(np.linspace(-4.0, 4.0, 41)), target, setup, 1, 0
        )
        config = OptimizerConfig(iterations=60, a=1.0, components=[1], seed=3)
        result = SpsaOptimizer(evaluator, 1, 0).optimize(base, target, setup, config)
        assert abs(result.best_J - grid.best_J) <= 0.05 * grid.best_J, (
            f"SPSA J={result.best_J}, grid J={grid.best_J}"
        )
