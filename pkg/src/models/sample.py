"""
Monte Carlo plan, pick-freeze samples and estimator vectors.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..utils.exceptions import DimensionError, PreconditionError
from .design import Alphabet, DesignMatrix


class EstimatorKind(Enum):
    """Which replications a sample carries and which estimator it feeds."""
    CLOSED = "closed"   # Bernoulli-like: Y, Y^F -> S_F
    DELTA = "delta"     # Rademacher-like: Y, Y^F, Y^{F^c} -> S_F - S_{F^c}

    @classmethod
    def for_alphabet(cls, alphabet: Alphabet) -> 'EstimatorKind':
        return cls.DELTA if alphabet is Alphabet.SIGNED else cls.CLOSED


@dataclass(frozen=True)
class MonteCarloPlan:
    """Sample size, seed and estimator kind of a pick-freeze run."""

    N: int
    seed: int
    kind: EstimatorKind = EstimatorKind.CLOSED

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, 'kind', EstimatorKind(self.kind))
        if int(self.N) < 2:
            raise PreconditionError(f"Monte Carlo size N must be >= 2, got {self.N}",
                                    module="pickfreeze")

    @classmethod
    def for_design(cls, design: DesignMatrix, N: int, seed: int) -> 'MonteCarloPlan':
        return cls(N=N, seed=seed, kind=EstimatorKind.for_alphabet(design.alphabet))

    def evaluation_cost(self, n: int) -> int:
        """(n+1) N for closed estimators, (2n+1) N for delta estimators."""
        rows = 2 * n if self.kind is EstimatorKind.DELTA else n
        return (rows + 1) * self.N


@dataclass(frozen=True)
class PickFreezeSample:
    """Realizations Y_k, Y_k^{F_j} and, for delta plans, Y_k^{F_j^c}."""

    y: np.ndarray
    y_frozen: np.ndarray
    plan: MonteCarloPlan
    y_frozen_complement: Optional[np.ndarray] = None
    eval_count: int = 0

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        y_frozen = np.atleast_2d(np.array(self.y_frozen, dtype=float))
        if y.shape != (self.plan.N,) or y_frozen.shape[1] != self.plan.N:
            raise DimensionError(
                f"sample shapes {y.shape}, {y_frozen.shape} do not match N={self.plan.N}",
                module="pickfreeze",
            )
        complement = self.y_frozen_complement
        if complement is not None:
            complement = np.atleast_2d(np.array(complement, dtype=float))
            if complement.shape != y_frozen.shape:
                raise DimensionError("complement replications do not match frozen ones",
                                     module="pickfreeze")
        for array in (y, y_frozen, complement):
            if array is not None:
                array.setflags(write=False)
        object.__setattr__(self, 'y', y)
        object.__setattr__(self, 'y_frozen', y_frozen)
        object.__setattr__(self, 'y_frozen_complement', complement)

    @property
    def N(self) -> int:
        return self.plan.N

    @property
    def n(self) -> int:
        return self.y_frozen.shape[0]

    @property
    def has_complement(self) -> bool:
        return self.y_frozen_complement is not None


@dataclass(frozen=True)
class EstimateVector:
    """E = (S_hat_{F_1}, ..., S_hat_{F_n}) or its delta counterpart."""

    values: np.ndarray
    plan: MonteCarloPlan
    design: Optional[DesignMatrix] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise PreconditionError("estimate vector has non-finite entries", module="pickfreeze")
        if self.design is not None and values.shape[0] != self.design.n:
            raise DimensionError(
                f"{values.shape[0]} estimates for a design with n={self.design.n}",
                module="pickfreeze",
            )
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class NoiseEstimate:
    """Delete-1 jackknife standard errors of the row estimators."""

    per_row: np.ndarray
    sigma: float

    def to_dict(self) -> dict:
        return {'sigma': self.sigma, 'per_row': self.per_row.tolist()}
