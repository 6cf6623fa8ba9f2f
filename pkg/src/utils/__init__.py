"""
Utility modules for the pick-freeze estimator.
"""

from .config import Config, RunConfig
from .logger import setup_logger, get_logger
from .exceptions import (
    RPFError,
    ConfigError,
    DimensionError,
    PreconditionError,
    DegenerateVarianceError,
    NumericalError,
    BudgetExceededError,
    InfeasibleError,
    reported_as_config_error,
)

__all__ = [
    "Config",
    "RunConfig",
    "setup_logger",
    "get_logger",
    "RPFError",
    "ConfigError",
    "DimensionError",
    "PreconditionError",
    "DegenerateVarianceError",
    "NumericalError",
    "BudgetExceededError",
    "InfeasibleError",
    "reported_as_config_error",
]
