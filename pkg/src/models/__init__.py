"""
Data models for additive test functions, designs, samples and reports.
"""

from .additive import AdditiveModel, InputSpec, SobolVector, Term, reference_model
from .design import DesignMatrix, DesignScheme, SchemeKind
from .lasso import KKTReport, LassoProblem, LassoSolution
from .reports import BoundParams, BoundReport, ClassicalCost, RecoveryReport
from .sample import EstimateVector, EstimatorKind, MonteCarloPlan, PickFreezeSample

__all__ = [
    "AdditiveModel", "InputSpec", "SobolVector", "Term", "reference_model",
    "DesignMatrix", "DesignScheme", "SchemeKind",
    "KKTReport", "LassoProblem", "LassoSolution",
    "BoundParams", "BoundReport", "ClassicalCost", "RecoveryReport",
    "EstimateVector", "EstimatorKind", "MonteCarloPlan", "PickFreezeSample",
]
