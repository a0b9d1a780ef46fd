"""
Shared plumbing of the subcommands: exit codes, config resolution, output setup
"""
import argparse
import logging
from typing import Any, Dict

from models.schemas import RunConfig
from services.config_manager import ConfigManager
from services.output_writer import OutputWriter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BLOWUP = 2
EXIT_OPTIMIZER = 3


def flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Config fields set by command-line flags"""
    return {
        "master_seed": getattr(args, "seed", None),
        "output_dir": getattr(args, "out", None),
        "n_paths": getattr(args, "paths", None),
        "scheme": getattr(args, "scheme", None),
    }


def config_from_args(args: argparse.Namespace, manager: ConfigManager) -> RunConfig:
    """
    Resolve defaults, optional scenario, --config document and flags

    Raises:
        ConfigError: If the document is unreadable or the result is invalid
    """
    document = manager.load_document(args.config) if getattr(args, "config", None) else {}
    if getattr(args, "scenario", None):
        document["scenario"] = args.scenario
    return manager.resolve(document, flag_overrides(args))


def open_output(config: RunConfig) -> OutputWriter:
    """Create the output directory and write the resolved config snapshot"""
    writer = OutputWriter(config.output_dir)
    writer.write_json("config_snapshot.json", config)
    return writer
