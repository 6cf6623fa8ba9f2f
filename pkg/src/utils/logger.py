"""
Logging utilities for the pick-freeze estimator.
"""

import logging
import logging.handlers
from pathlib import Path
from typing import Optional

from .config import Config


ROOT_LOGGER = "src"


def setup_logger(name: str = ROOT_LOGGER, config: Optional[Config] = None,
                 log_to_file: bool = True) -> logging.Logger:
    """Set up and configure the package logger."""
    logger = logging.getLogger(name)

    if logger.handlers:  # Already configured
        return logger

    if config is None:
        config = Config()

    log_config = config.get('logging', {})
    paths_config = config.get_paths_config()

    logger.setLevel(getattr(logging, log_config.get('level', 'INFO')))

    formatter = logging.Formatter(
        log_config.get('format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    )

    # Console handler
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_to_file:
        log_dir = Path(paths_config.get('logs', 'data/logs'))
        log_dir.mkdir(parents=True, exist_ok=True)

        file_handler = logging.handlers.RotatingFileHandler(
            log_dir / "rpf_sobol.log",
            maxBytes=int(log_config.get('max_file_size', 10 * 1024 * 1024)),
            backupCount=int(log_config.get('backup_count', 7))
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str = ROOT_LOGGER) -> logging.Logger:
    """Get logger instance."""
    return logging.getLogger(name)
