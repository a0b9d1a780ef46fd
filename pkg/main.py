"""
Command-line entry point of the stochastic LLG toolkit

    python main.py simulate   --config run.json --out output/
    python main.py invariants --scenario switching
    python main.py optimize   --scenario switching --paths 16
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

from commands.common import EXIT_BLOWUP, EXIT_CONFIG, EXIT_OK, EXIT_OPTIMIZER, config_from_args
from commands.invariants import cmd_invariants
from commands.optimize import cmd_optimize
from commands.simulate import cmd_simulate
from models.errors import BlowUpError, LlgError, OptimizerError
from services.config_manager import get_config_manager
from utils.logger import setup_logger
from utils.settings import LlgSettings

logger = logging.getLogger(__name__)

COMMANDS = {
    "simulate": cmd_simulate,
    "invariants": cmd_invariants,
    "optimize": cmd_optimize,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--scenario", help="named scenario from config/defaults.json")
    common.add_argument("--seed", type=int, metavar="U64", help="master seed")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--paths", type=int, metavar="N", help="number of Monte-Carlo paths")
    common.add_argument("--scheme", choices=["ito", "heun"], help="time-stepping scheme")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    parser = argparse.ArgumentParser(
        prog="llg",
        description="Spectral-Galerkin simulation, verification and control of the stochastic LLG equation",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("simulate", parents=[common], help="simulate one configuration")
    subparsers.add_parser("invariants", parents=[common], help="run convergence sweeps")
    subparsers.add_parser("optimize", parents=[common], help="optimize the control with SPSA")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the subcommand and map failures to exit codes

    Returns:
        0 ok, 1 configuration error, 2 blow-up, 3 optimizer failure
    """
    load_dotenv()
    settings = LlgSettings()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors, which would read as a blow-up
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG
    setup_logger(level=args.log_level or settings.log_level)

    try:
        config = config_from_args(args, get_config_manager())
        return COMMANDS[args.command](config, settings.threads)

    except BlowUpError as e:
        logger.error(f"Blow-up at step {e.step} (t={e.time:.6g}): {e}")
        return EXIT_BLOWUP
    except OptimizerError as e:
        logger.error(f"Optimizer failure: {e}")
        return EXIT_OPTIMIZER
    except (LlgError, ValueError, FileNotFoundError, json.JSONDecodeError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
