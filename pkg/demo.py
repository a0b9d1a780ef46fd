"""
Demo script: the switching scenario end to end, small enough to run in seconds.
Simulates one path, prints its invariant report, then runs a few SPSA iterations.
"""
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from services.config_manager import ConfigManager
from services.simulation_factory import build_control, build_cost_spec, create_services
from utils.logger import setup_logger


def demo():
    print("=" * 70)
    print("🧲 Stochastic LLG Demo: switching scenario")
    print("=" * 70)
    print()

    setup_logger(level="WARNING")
    manager = ConfigManager()
    config = manager.resolve(
        {"scenario": "switching"},
        {"n_paths": 4, "optimizer": {"iterations": 5}},
    )
    services = create_services(config)
    setup = services.setup
    basis = setup.params.basis
    print(f"📦 n={config.n_modes}, M={config.grid_points}, T={config.T}, dt={config.dt}, "
          f"alpha={config.alpha}, scheme={config.scheme.value}\n")

    trajectory = services.runner.simulate_path(setup, None, config.master_seed, 0, services.integrator)
    report = services.checker.check_trajectory(trajectory, basis)
    print("🔍 Invariant report (path 0, no control)")
    for check in report.checks:
        mark = "✅" if check.passed else "❌"
        print(f"   {mark} {check.name:<18} {check.value:.3e}  (limit {check.threshold:.1e})")
    print(f"   initial exchange energy: {report.initial_energy:.6f}\n")

    p0 = build_control(config)
    cost_spec = build_cost_spec(config, basis)
    baseline = services.evaluator.evaluate_cost(p0, cost_spec, setup, config.n_paths, config.master_seed)
    print(f"💰 J(0) = {baseline.J:.5f}  (tracking {baseline.tracking:.5f}, terminal {baseline.terminal:.5f})")

    result = services.optimizer.optimize(p0, cost_spec, setup, config.optimizer)
    for step in result.trace:
        flag = "accepted" if step.accepted else "rejected"
        print(f"   iter {step.iteration}: J={step.J:.5f} candidate={step.J_candidate} ({flag})")
    print(f"\n🏁 Best J = {result.best_J:.5f} ({(1 - result.best_J / baseline.J):.1%} below zero control)")


if __name__ == "__main__":
    demo()
