"""Model evaluation and the exact Sobol oracle for additive polynomial models."""

from typing import FrozenSet, Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from ..models.additive import AdditiveModel, SobolVector, Term
from ..utils.exceptions import DegenerateVarianceError, DimensionError, PreconditionError
from ..utils.logger import get_logger


logger = get_logger(__name__)


def evaluate(model: AdditiveModel, x: Sequence[float]) -> float:
    """f(x) = sum_i f_i(x_i) at a single point."""
    point = np.asarray(x, dtype=float)
    if point.ndim != 1 or point.shape[0] != model.p:
        raise DimensionError(
            f"point of shape {point.shape} for a model with p={model.p}", module="model"
        )
    return float(model.evaluate_batch(point[None, :])[0])


def evaluate_batch(model: AdditiveModel, X: np.ndarray) -> np.ndarray:
    """Evaluate on the rows of an (N, p) array."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.p:
        raise DimensionError(f"array of shape {X.shape} for p={model.p}", module="model")
    return model.evaluate_batch(X)


def uniform_moment(k: int) -> float:
    """E[X^k] for X uniform on [0, 1]."""
    return 1.0 / (k + 1)


def _uniform_mean(coefficients: Sequence[float]) -> float:
    return float(sum(c * uniform_moment(k) for k, c in enumerate(coefficients)))


def term_variance(term: Term) -> float:
    """Var(f_i(X_i)) from exact uniform moments.

    The polynomial is centered before squaring so that the result does not
    suffer from E[f^2] - E[f]^2 cancellation.
    """
    centered = np.array(term.coefficients, dtype=float)
    centered[0] -= _uniform_mean(term.coefficients)
    return max(_uniform_mean(P.polymul(centered, centered)), 0.0)


def term_variance_quadrature(term: Term, nodes: int = 100_000) -> float:
    """Var(f_i(X_i)) by the composite midpoint rule on ``nodes`` cells."""
    x = (np.arange(nodes) + 0.5) / nodes
    values = term(x)
    mean = values.mean()
    return float(np.mean((values - mean) ** 2))


def analytic_sobol(model: AdditiveModel) -> SobolVector:
    """Exact first-order indices S_i = Var(f_i) / sum_j Var(f_j)."""
    if not model.input.all_uniform:
        raise PreconditionError("analytic indices need uniform [0,1] inputs", module="model")

    variances = np.zeros(model.p)
    for term in model.terms:
        variances[term.index - 1] = term_variance(term)

    total = float(variances.sum())
    if total <= 0.0:
        raise DegenerateVarianceError("model output has zero variance", module="model")

    return SobolVector(values=variances / total, total_variance=total)


def closed_index(model: AdditiveModel, F: Iterable[int]) -> float:
    """S_F = sum_{i in F} S_i for a set of 1-based labels."""
    labels = frozenset(int(i) for i in F)
    for i in labels:
        if not 1 <= i <= model.p:
            raise DimensionError(f"label {i} outside [1, {model.p}]", module="model")
    if not labels:
        return 0.0
    values = analytic_sobol(model).values
    return float(sum(values[i - 1] for i in sorted(labels)))


def active_set(model: AdditiveModel) -> FrozenSet[int]:
    """Labels whose term has nonzero variance."""
    return frozenset(t.index for t in model.terms if term_variance(t) > 0.0)
