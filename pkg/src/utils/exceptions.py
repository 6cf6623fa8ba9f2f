"""
Error types raised by the estimator.

Every error carries the name of the module that raised it so the CLI can
report ``[module] message`` and pick an exit code.
"""

from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional


class RPFError(Exception):
    """Base class for all estimator errors."""

    exit_code = 3

    def __init__(self, message: str, module: str = "rpf", details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.module = module
        self.details = details or {}

    def __str__(self) -> str:
        return f"[{self.module}] {self.message}"


class ConfigError(RPFError, ValueError):
    """Invalid or missing configuration."""

    exit_code = 2


class DimensionError(RPFError, ValueError):
    """Array or index dimensions do not agree."""


class PreconditionError(RPFError, ValueError):
    """An operation was called outside its validated domain."""


class DegenerateVarianceError(RPFError, ArithmeticError):
    """The empirical variance in a pick-freeze ratio vanished."""


class NumericalError(RPFError, ArithmeticError):
    """A linear-algebra step failed (singular or ill-conditioned system)."""


class BudgetExceededError(RPFError):
    """An exhaustive enumeration would exceed its configured budget."""


class InfeasibleError(RPFError):
    """No parameter choice satisfies the requested constraint."""


@contextmanager
def reported_as_config_error() -> Iterator[None]:
    """Re-raise precondition failures on user-supplied values as :class:`ConfigError`."""
    try:
        yield
    except PreconditionError as e:
        raise ConfigError(e.message, module=e.module, details=e.details) from e
