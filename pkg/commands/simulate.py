"""
simulate: one trajectory with its invariant report, plus ensemble statistics
"""
import logging

from commands.common import EXIT_BLOWUP, EXIT_OK, open_output
from models.errors import BlowUpError
from models.schemas import RunConfig
from services.control import realize_control
from services.simulation_factory import build_control, create_services

logger = logging.getLogger(__name__)


def cmd_simulate(config: RunConfig, threads: int = 1) -> int:
    """
    Integrate path 0, write trajectory.csv and report.json

    With n_paths > 1 the ensemble statistics go to ensemble_stats.json.

    Returns:
        EXIT_OK, or EXIT_BLOWUP if any path diverged
    """
    writer = open_output(config)
    services = create_services(config, threads)
    setup = services.setup
    basis = setup.params.basis
    control = None
    if config.control.coefficients is not None:
        control = realize_control(build_control(config), basis)

    logger.info(f"Simulating {setup.summary()}")
    try:
        trajectory = services.runner.simulate_path(
            setup, control, config.master_seed, 0, services.integrator
        )
    except BlowUpError as e:
        logger.error(f"Simulation blew up at step {e.step} (t={e.time:.6g}): {e}")
        return EXIT_BLOWUP

    writer.write_trajectory(trajectory, basis, config.save_stride)
    report = services.checker.check_trajectory(trajectory, basis)
    writer.write_json("report.json", report)
    logger.info(f"Initial exchange energy {report.initial_energy:.6g}, checks passed: {report.passed}")

    if config.n_paths > 1:
        stats = services.runner.monte_carlo(
            setup, control, config.n_paths, config.master_seed, moment_order=config.moment_order
        )
        writer.write_json("ensemble_stats.json", stats)
        if stats.n_failed:
            logger.error(f"{stats.n_failed} of {stats.n_paths} paths blew up")
            return EXIT_BLOWUP
    return EXIT_OK
