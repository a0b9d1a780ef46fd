"""
Logging configuration for the LLG toolkit
"""
import logging
import sys
from typing import Optional

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def setup_logger(name: Optional[str] = None, level: str = "INFO") -> logging.Logger:
    """
    Attach one stdout handler with the shared format

    Args:
        name: Logger name (defaults to root logger)
        level: DEBUG, INFO, WARNING or ERROR; anything else falls back to INFO

    Returns:
        Configured logger instance
    """
    requested = (level or "INFO").upper()
    resolved = requested if requested in LEVELS else "INFO"

    logger = logging.getLogger(name)
    logger.setLevel(resolved)
    logger.handlers = []

    handler = logging.StreamHandler(sys.stdout)
    handler.setLevel(resolved)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(handler)

    if resolved != requested:
        logger.warning(f"Unknown log level '{level}', using INFO")
    return logger
