"""
Additive polynomial test models and Sobol index vectors.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.exceptions import DimensionError, PreconditionError


class Distribution(Enum):
    """Supported input distributions."""
    UNIFORM_01 = "uniform"


@dataclass(frozen=True)
class InputSpec:
    """Dimension and per-coordinate distribution of the inputs X_1..X_p."""

    p: int
    distributions: Tuple[Distribution, ...] = ()

    def __post_init__(self):
        if int(self.p) < 1:
            raise DimensionError(f"input dimension must be >= 1, got {self.p}", module="model")
        if not self.distributions:
            object.__setattr__(self, 'distributions', (Distribution.UNIFORM_01,) * int(self.p))
        if len(self.distributions) != self.p:
            raise DimensionError(
                f"{len(self.distributions)} distribution tags for p={self.p}", module="model"
            )
        for tag in self.distributions:
            if not isinstance(tag, Distribution):
                raise PreconditionError(f"unsupported distribution tag: {tag!r}", module="model")

    @property
    def all_uniform(self) -> bool:
        return all(tag is Distribution.UNIFORM_01 for tag in self.distributions)


@dataclass(frozen=True)
class Term:
    """Univariate polynomial f_i(X_i) = c0 + c1 X_i + c2 X_i^2 + ...

    ``index`` is the 1-based input label i.
    """

    index: int
    coefficients: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coefficients', tuple(float(c) for c in self.coefficients))
        if not self.coefficients:
            object.__setattr__(self, 'coefficients', (0.0,))

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coefficients)


@dataclass(frozen=True)
class AdditiveModel:
    """f(X) = sum_i f_i(X_i) with at most one polynomial term per input."""

    input: InputSpec
    terms: Tuple[Term, ...]

    def __post_init__(self):
        terms = tuple(sorted(self.terms, key=lambda t: t.index))
        seen = set()
        for term in terms:
            if not 1 <= term.index <= self.input.p:
                raise DimensionError(
                    f"term index {term.index} outside [1, {self.input.p}]", module="model"
                )
            if term.index in seen:
                raise PreconditionError(f"duplicate term for index {term.index}", module="model")
            seen.add(term.index)
        object.__setattr__(self, 'terms', terms)

    @property
    def p(self) -> int:
        return self.input.p

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        """Evaluate on the rows of an (N, p) array."""
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[0])
        for term in self.terms:
            out += term(X[:, term.index - 1])
        return out

    @classmethod
    def from_coefficients(cls, p: int, table: Dict[int, Sequence[float]]) -> 'AdditiveModel':
        """Build a model from ``{index: (c0, c1, ...)}``."""
        terms = tuple(Term(index=int(i), coefficients=tuple(c)) for i, c in table.items())
        return cls(input=InputSpec(p=p), terms=terms)

    def to_dict(self) -> dict:
        return {
            'p': self.p,
            'terms': {term.index: list(term.coefficients) for term in self.terms},
        }

    def __str__(self) -> str:
        return f"AdditiveModel(p={self.p}, terms={[t.index for t in self.terms]})"


def reference_model(p: int = 300) -> AdditiveModel:
    """X1^2 + 4 X1 + 4 X2 + 10 X3 in dimension ``p``."""
    return AdditiveModel.from_coefficients(p, {
        1: (0.0, 4.0, 1.0),
        2: (0.0, 4.0),
        3: (0.0, 10.0),
    })


@dataclass(frozen=True)
class SobolVector:
    """First-order Sobol indices S_1..S_p.

    Exact vectors returned by the analytic oracle are non-negative and sum to
    one. Estimated vectors may violate both.
    """

    values: np.ndarray
    total_variance: float = float('nan')
    estimated: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def support(self) -> frozenset:
        """1-based labels with a nonzero index."""
        return frozenset(int(i) + 1 for i in np.flatnonzero(self.values))

    @property
    def s(self) -> int:
        return len(self.support)

    @property
    def s_min(self) -> Optional[float]:
        nonzero = self.values[self.values != 0]
        return float(nonzero.min()) if nonzero.size else None

    def __getitem__(self, label: int) -> float:
        """Index by 1-based variable label."""
        return float(self.values[label - 1])

    def ordering(self, labels: Optional[Iterable[int]] = None) -> List[int]:
        """Labels sorted by decreasing index value."""
        labels = sorted(labels) if labels is not None else list(range(1, self.p + 1))
        return sorted(labels, key=lambda i: -self.values[i - 1])

    def to_dict(self) -> dict:
        return {
            'values': self.values.tolist(),
            'total_variance': self.total_variance,
            'estimated': self.estimated,
        }
