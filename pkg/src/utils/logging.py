"""Loguru configuration shared by the CLI and the analyze graph."""

import sys
from pathlib import Path
from typing import Optional, Union

from loguru import logger

from src.config import settings

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
    "<level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} | {message}"


def setup_logging(verbose: Optional[bool] = None, log_file: Optional[Union[str, Path]] = None) -> None:
    """
    Replace all sinks: stderr at DEBUG when verbose (default COPE_VERBOSE) else INFO.

    ``log_file``, when given, receives every DEBUG record of the run without colors.
    """
    logger.remove()
    level = "DEBUG" if (settings.VERBOSE if verbose is None else verbose) else "INFO"
    logger.add(sys.stderr, level=level, format=CONSOLE_FORMAT, colorize=True)
    if log_file is not None:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(str(log_file), level="DEBUG", format=FILE_FORMAT, colorize=False, mode="w", encoding="utf-8")
    logger.debug("copeset logging initialised (level={}, file={})", level, log_file)
