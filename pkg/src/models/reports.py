"""
Bound-calculator inputs and outputs, and support-recovery reports.
"""

from dataclasses import asdict, dataclass, field, fields, replace
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np

from ..utils.exceptions import PreconditionError


@dataclass(frozen=True)
class BoundParams:
    """Inputs shared by the bound calculators.

    Only the fields a calculator reads are required; each calculator checks
    its own preconditions.
    """

    p: Optional[int] = None
    s: Optional[int] = None
    n: Optional[int] = None
    N: Optional[int] = None
    mu: Optional[float] = None
    delta: Optional[float] = None
    delta_prime: Optional[float] = None
    A: Optional[float] = None
    sigma: Optional[float] = None
    c: Optional[float] = None
    C1: Optional[float] = None
    C2: Optional[float] = None
    C3: Optional[float] = None
    d: Optional[int] = None
    e: Optional[float] = None
    r: Optional[float] = None
    rho: Optional[float] = None
    kappa: Optional[float] = None
    theta1: Optional[float] = None
    theta2: Optional[float] = None
    r0: Optional[float] = None

    def require(self, calculator: str, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise PreconditionError(f"{calculator} needs {', '.join(missing)}", module="bounds")

    def with_values(self, **values) -> 'BoundParams':
        return replace(self, **values)

    @classmethod
    def field_names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class BoundReport:
    """Penalty, error threshold and failure probability of one theorem instance.

    ``alpha`` is reported as computed, values >= 1 only set ``vacuous``.
    """

    r: float
    r_min: float
    t: float
    alpha: float
    n_min: Optional[int] = None
    extras: Dict[str, float] = field(default_factory=dict)
    calculator: str = ""

    def __post_init__(self):
        if self.t < 0:
            raise PreconditionError(f"error threshold must be >= 0, got {self.t}", module="bounds")

    @property
    def vacuous(self) -> bool:
        return bool(self.alpha >= 1.0)

    def to_flat_dict(self) -> dict:
        """Flat mapping with ``extras.<name>`` keys, as emitted by ``bounds``."""
        flat = {
            'r': self.r,
            'r_min': self.r_min,
            't': self.t,
            'alpha': self.alpha,
            'n_min': self.n_min,
            'vacuous': self.vacuous,
        }
        for key, value in self.extras.items():
            flat[f"extras.{key}"] = value
        return flat


@dataclass(frozen=True)
class ClassicalCost:
    """Cost of estimating all p indices one by one to a common interval width."""

    per_test_level: float
    z: float
    N_prime: int
    total_evals: int

    @property
    def interval_constant(self) -> float:
        """2 z, the interval length times sqrt(N')."""
        return 2.0 * self.z

    def to_dict(self) -> dict:
        return {
            'per_test_level': self.per_test_level,
            'z': self.z,
            'interval_constant': self.interval_constant,
            'N_prime': self.N_prime,
            'total_evals': self.total_evals,
        }


@dataclass(frozen=True)
class SupportComparison:
    """Recovered support against the true one."""

    true_positives: int
    false_positives: int
    false_negatives: int
    exact: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RecoveryReport:
    """Thresholded-LASSO classification of the inputs 1..p.

    ``support``, ``rejected`` and ``undecided`` partition {1, ..., p}.
    """

    threshold: float
    support: FrozenSet[int]
    rejected: FrozenSet[int]
    undecided: FrozenSet[int]
    p: int
    refit_values: Optional[np.ndarray] = None
    truth_comparison: Optional[SupportComparison] = None
    s_min: Optional[float] = None

    def __post_init__(self):
        union = self.support | self.rejected | self.undecided
        overlap = (self.support & self.rejected) | (self.support & self.undecided) \
            | (self.rejected & self.undecided)
        if overlap or union != frozenset(range(1, self.p + 1)):
            raise PreconditionError("support, rejected and undecided must partition 1..p",
                                    module="recovery")
        if self.refit_values is not None:
            values = np.array(self.refit_values, dtype=float)
            values.setflags(write=False)
            object.__setattr__(self, 'refit_values', values)

    def with_refit(self, values: np.ndarray) -> 'RecoveryReport':
        return replace(self, refit_values=values)

    def with_truth(self, comparison: SupportComparison) -> 'RecoveryReport':
        return replace(self, truth_comparison=comparison)

    def to_dict(self) -> dict:
        """JSON form; refit values as sparse ``[index, value]`` pairs."""
        payload = {
            'threshold': self.threshold,
            's_min': self.s_min,
            'support': sorted(self.support),
            'rejected': sorted(self.rejected),
            'undecided': sorted(self.undecided),
            'refit_values': None,
            'truth_comparison': None,
        }
        if self.refit_values is not None:
            payload['refit_values'] = [
                [i, float(self.refit_values[i - 1])] for i in sorted(self.support)
            ]
        if self.truth_comparison is not None:
            payload['truth_comparison'] = self.truth_comparison.to_dict()
        return payload


@dataclass(frozen=True)
class CoverageResult:
    """Empirical failure rate of a bound over seeded synthetic trials."""

    trials: int
    failures: int
    alpha: float
    t: float
    max_errors: Tuple[float, ...] = field(default=(), repr=False)

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials

    @property
    def limit(self) -> float:
        """alpha + 3 sqrt(alpha / trials)."""
        return self.alpha + 3.0 * (self.alpha / self.trials) ** 0.5

    @property
    def passed(self) -> bool:
        return self.failure_rate <= self.limit

    def to_dict(self) -> dict:
        return {
            'trials': self.trials,
            'failures': self.failures,
            'failure_rate': self.failure_rate,
            'alpha': self.alpha,
            'limit': self.limit,
            't': self.t,
            'passed': self.passed,
        }
