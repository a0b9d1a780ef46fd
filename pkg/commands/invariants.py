"""
invariants: convergence sweeps of the configured studies
"""
import logging

from commands.common import EXIT_OK, open_output
from models.schemas import RunConfig
from services.simulation_factory import create_services

logger = logging.getLogger(__name__)


def cmd_invariants(config: RunConfig, threads: int = 1) -> int:
    """
    Run every sweep in config.sweeps; write sweep_<name>.csv and sweep_<name>.json

    Runs that blow up do not abort a sweep; their rows carry failed=true.

    Raises:
        PathRefinementError: If a sweep's steps are not refinements of one path
    """
    writer = open_output(config)
    services = create_services(config, threads)
    if not config.sweeps:
        logger.warning("No sweeps configured")
        return EXIT_OK

    for spec in config.sweeps:
        logger.info(f"Sweep '{spec.name}'")
        table = services.sweep_for(spec.alpha).convergence_sweep(
            axis=spec.axis,
            values=spec.values,
            metric=spec.metric,
            base_n_modes=spec.n_modes or config.n_modes,
            base_dt=config.dt,
            master_seed=config.master_seed,
            n_paths=spec.n_paths,
            paired_dt=spec.paired_dt,
            scheme=spec.scheme or config.scheme,
        )
        writer.write_sweep(table, f"sweep_{spec.name}.csv")
        writer.write_json(f"sweep_{spec.name}.json", table)
    return EXIT_OK
