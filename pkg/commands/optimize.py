"""
optimize: SPSA search for a cheaper control, with an optional grid check
"""
import logging

import numpy as np

from commands.common import EXIT_OK, open_output
from models.schemas import RunConfig
from services.control import grid_search
from services.simulation_factory import build_control, build_cost_spec, create_services

logger = logging.getLogger(__name__)


def cmd_optimize(config: RunConfig, threads: int = 1) -> int:
    """
    Write optimization_trace.csv, best_control.json and cost_report.json

    With optimizer.grid_check set, the brute-force minimum over that
    2-parameter family goes to grid_check.json.

    Raises:
        OptimizerError: If the starting point cannot be evaluated
    """
    writer = open_output(config)
    services = create_services(config, threads)
    setup = services.setup
    p0 = build_control(config)
    cost_spec = build_cost_spec(config, setup.params.basis)

    result = services.optimizer.optimize(p0, cost_spec, setup, config.optimizer)
    writer.write_trace(result)
    writer.write_json("best_control.json", result)

    best_report = services.evaluator.evaluate_cost(
        result.best_param(), cost_spec, setup, config.n_paths, config.master_seed
    )
    writer.write_json("cost_report.json", best_report)
    logger.info(f"Best J={result.best_J:.6g} from initial J={result.initial_J:.6g}")

    check = config.optimizer.grid_check
    if check is not None:
        values = np.linspace(check.lower, check.upper, check.points)
        grid = grid_search(
            services.evaluator, p0, check.axes, values, cost_spec, setup,
            config.n_paths, config.master_seed,
        )
        writer.write_json("grid_check.json", grid)
        gap = (result.best_J - grid.best_J) / grid.best_J if grid.best_J else 0.0
        logger.info(f"Grid check: best J={grid.best_J:.6g}, optimizer gap {gap:+.2%}")
    return EXIT_OK
