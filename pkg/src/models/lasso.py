"""
LASSO problem and solution models.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..utils.exceptions import DimensionError, PreconditionError
from .design import DesignMatrix


@dataclass(frozen=True)
class LassoProblem:
    """argmin_U (1/n)||E - Phi U||^2 + 2 r ||U||_1."""

    E: np.ndarray
    phi: DesignMatrix
    r: float

    def __post_init__(self):
        E = np.array(self.E, dtype=float).ravel()
        if E.shape[0] != self.phi.n:
            raise DimensionError(f"E has length {E.shape[0]} but the design has n={self.phi.n}",
                                 module="lasso")
        if not np.all(np.isfinite(E)):
            raise PreconditionError("E has non-finite entries", module="lasso")
        if not self.r > 0:
            raise PreconditionError(f"regularization r must be > 0, got {self.r}", module="lasso")
        E.setflags(write=False)
        object.__setattr__(self, 'E', E)
        object.__setattr__(self, 'r', float(self.r))

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def p(self) -> int:
        return self.phi.p


@dataclass(frozen=True)
class LassoSolution:
    """Coordinate-descent fixed point and its convergence diagnostics."""

    s_hat: np.ndarray
    r: float
    iterations: int
    objective: float
    kkt_residual: float
    converged: bool
    objective_trace: Tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        s_hat = np.array(self.s_hat, dtype=float)
        s_hat.setflags(write=False)
        object.__setattr__(self, 's_hat', s_hat)
        object.__setattr__(self, 'objective_trace', tuple(float(v) for v in self.objective_trace))

    @property
    def support(self) -> frozenset:
        """1-based labels of the nonzero coordinates."""
        return frozenset(int(i) + 1 for i in np.flatnonzero(self.s_hat))

    def to_dict(self) -> dict:
        return {
            'r': self.r,
            'iterations': self.iterations,
            'objective': self.objective,
            'kkt_residual': self.kkt_residual,
            'converged': self.converged,
            'support': sorted(self.support),
        }


@dataclass(frozen=True)
class KKTReport:
    """First-order optimality certificate of a candidate solution."""

    dantzig_ok: bool
    support_stationarity_ok: bool
    max_violation: float

    @property
    def ok(self) -> bool:
        return self.dantzig_ok and self.support_stationarity_ok

    def to_dict(self) -> dict:
        return {
            'dantzig_ok': self.dantzig_ok,
            'support_stationarity_ok': self.support_stationarity_ok,
            'max_violation': self.max_violation,
        }
