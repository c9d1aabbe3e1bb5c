"""Configure logging for the PPC package."""
import logging
from typing import Optional

import coloredlogs

from lib.config import LOG_CONFIG

# Library modules log under their import path, the entry script under PPC.
_CONFIGURED_TREES = (LOG_CONFIG["root_logger"], "lib")


def get_logger(name: str):
    """Helper function to append 'PPC' to logger name and return logger."""
    return logging.getLogger(f"{LOG_CONFIG['root_logger']}.{name}")


def configure_root_logger(logfile: Optional[str] = None, loglevel: str = "INFO"):
    """Configure the PPC logger and the lib module loggers.

    Args:
        logfile: Path to logfile or None.
        loglevel: Level of detail at which to log, by default INFO.
    """
    log_format = LOG_CONFIG["log_format"]
    for tree in _CONFIGURED_TREES:
        logger = logging.getLogger(tree)
        coloredlogs.install(fmt=log_format, level=loglevel.upper(), logger=logger)
        logger.propagate = False

        logger.addHandler(logging.NullHandler())

        if logfile is not None:
            file_logger = logging.FileHandler(logfile)
            file_logger.setFormatter(logging.Formatter(log_format))
            logger.addHandler(file_logger)
