"""
Outcome of one randomized pick-freeze run.
"""

from dataclasses import dataclass, field
from typing import List, Optional

from .additive import AdditiveModel, SobolVector
from .design import DesignMatrix
from .lasso import LassoSolution
from .reports import BoundReport, RecoveryReport
from .sample import EstimateVector, NoiseEstimate, PickFreezeSample


@dataclass
class RunResult:
    """Everything a run produced, before any artifact is written."""

    model: AdditiveModel
    design: DesignMatrix
    sample: PickFreezeSample
    estimates: EstimateVector
    noise: NoiseEstimate
    solutions: List[LassoSolution]
    chosen: LassoSolution
    recovery: Optional[RecoveryReport] = None
    bound: Optional[BoundReport] = None
    truth: Optional[SobolVector] = None
    refit_evaluations: int = 0
    warnings: List[str] = field(default_factory=list)

    @property
    def eval_count(self) -> int:
        return self.sample.eval_count

    @property
    def expected_evals(self) -> int:
        return self.sample.plan.evaluation_cost(self.design.n)

    @property
    def smallest(self) -> LassoSolution:
        """Solution at the smallest penalty on the path."""
        return min(self.solutions, key=lambda s: s.r)

    def evaluations(self) -> dict:
        return {
            'kind': self.sample.plan.kind.value,
            'n': self.design.n,
            'N': self.sample.N,
            'model_evaluations': self.eval_count,
            'formula': self.expected_evals,
            'matches_formula': self.eval_count == self.expected_evals,
            'refit_evaluations': self.refit_evaluations,
        }


@dataclass(frozen=True)
class Criterion:
    """One machine-checkable acceptance criterion."""

    name: str
    passed: bool
    observed: object = None
    expected: object = None

    def to_dict(self) -> dict:
        return {'name': self.name, 'passed': self.passed,
                'observed': self.observed, 'expected': self.expected}


@dataclass
class ExperimentOutcome:
    """Pass/fail summary of a reproduced experiment."""

    experiment_id: str
    criteria: List[Criterion] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def check(self, name: str, passed: bool, observed=None, expected=None) -> None:
        self.criteria.append(Criterion(name, bool(passed), observed, expected))

    def to_dict(self) -> dict:
        return {
            'experiment': self.experiment_id,
            'passed': self.passed,
            'criteria': [c.to_dict() for c in self.criteria],
            'details': self.details,
        }
