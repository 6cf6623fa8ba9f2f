"""
Design matrix models: sampling schemes, matrices and their diagnostics.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Optional, Tuple

import numpy as np

from ..utils.exceptions import DimensionError, PreconditionError


class SchemeKind(Enum):
    """Random design families."""
    BERNOULLI = "bernoulli"
    RADEMACHER = "rademacher"
    EXPANDER = "expander"


class Alphabet(Enum):
    """Entry alphabet of a design matrix."""
    BINARY = "binary"   # {0, 1}
    SIGNED = "signed"   # {-1, +1}

    @property
    def values(self) -> Tuple[int, int]:
        return (0, 1) if self is Alphabet.BINARY else (-1, 1)


@dataclass(frozen=True)
class DesignScheme:
    """Sampling law of the design entries."""

    kind: SchemeKind
    mu: Optional[float] = None
    d: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.kind, str):
            try:
                object.__setattr__(self, 'kind', SchemeKind(self.kind.lower()))
            except ValueError:
                raise PreconditionError(f"unknown design scheme: {self.kind}", module="design")

        if self.kind is SchemeKind.BERNOULLI:
            if self.mu is None or not 0.0 < self.mu < 1.0:
                raise PreconditionError(f"Bernoulli design needs 0 < mu < 1, got {self.mu}",
                                        module="design")
        if self.kind is SchemeKind.EXPANDER:
            if self.d is None or int(self.d) < 1:
                raise PreconditionError(f"expander design needs a left degree d >= 1, got {self.d}",
                                        module="design")

    @classmethod
    def bernoulli(cls, mu: float) -> 'DesignScheme':
        return cls(SchemeKind.BERNOULLI, mu=mu)

    @classmethod
    def rademacher(cls) -> 'DesignScheme':
        return cls(SchemeKind.RADEMACHER)

    @classmethod
    def expander(cls, d: int) -> 'DesignScheme':
        return cls(SchemeKind.EXPANDER, d=int(d))

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet.SIGNED if self.kind is SchemeKind.RADEMACHER else Alphabet.BINARY

    @property
    def label(self) -> str:
        """Compact text form: ``bernoulli:0.5``, ``rademacher``, ``expander:3``."""
        if self.kind is SchemeKind.BERNOULLI:
            return f"bernoulli:{self.mu!r}"
        if self.kind is SchemeKind.EXPANDER:
            return f"expander:{self.d}"
        return "rademacher"

    @classmethod
    def from_label(cls, label: str) -> 'DesignScheme':
        kind, _, arg = label.partition(':')
        kind = kind.strip().lower()
        if kind == SchemeKind.BERNOULLI.value:
            return cls.bernoulli(float(arg))
        if kind == SchemeKind.EXPANDER.value:
            return cls.expander(int(arg))
        return cls(kind)


@dataclass(frozen=True)
class DesignMatrix:
    """An n x p design over {0,1} or {-1,+1}; row j encodes the freeze set F_j."""

    entries: np.ndarray
    scheme: DesignScheme
    seed: int = 0

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.int8, copy=True)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise DimensionError(f"design must be a non-empty 2-D array, got {entries.shape}",
                                 module="design")
        allowed = np.array(self.scheme.alphabet.values, dtype=np.int8)
        if not np.isin(entries, allowed).all():
            raise PreconditionError(
                f"entries outside the {self.scheme.alphabet.value} alphabet", module="design"
            )
        if self.scheme.kind is SchemeKind.EXPANDER:
            degrees = entries.sum(axis=0)
            if not np.all(degrees == self.scheme.d):
                raise PreconditionError(
                    f"expander columns must each have exactly d={self.scheme.d} ones",
                    module="design",
                )
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def p(self) -> int:
        return self.entries.shape[1]

    @property
    def alphabet(self) -> Alphabet:
        return self.scheme.alphabet

    @property
    def frozen_mask(self) -> np.ndarray:
        """Boolean (n, p) mask, True where input i is frozen in row j."""
        return self.entries == 1

    def as_float(self) -> np.ndarray:
        return self.entries.astype(float)

    def __str__(self) -> str:
        return f"DesignMatrix(n={self.n}, p={self.p}, scheme={self.scheme.label}, seed={self.seed})"


@dataclass(frozen=True)
class GramStats:
    """Summary of Psi = (1/n) Phi^T Phi."""

    max_coherence: float
    min_col_normsq_over_n: float
    diag_range: Tuple[float, float]

    @property
    def theta1(self) -> float:
        return self.max_coherence

    @property
    def theta2(self) -> float:
        return self.min_col_normsq_over_n

    def to_dict(self) -> dict:
        return {
            'max_coherence': self.max_coherence,
            'min_col_normsq_over_n': self.min_col_normsq_over_n,
            'diag_min': self.diag_range[0],
            'diag_max': self.diag_range[1],
        }


@dataclass(frozen=True)
class DegreeStats:
    """Column degrees ||Phi_i||_0 and the Bernoulli degree-window check."""

    degrees: Tuple[int, ...]
    min_degree: int
    max_degree: int
    window: Optional[Tuple[float, float]] = None
    coherence_limit: Optional[float] = None
    within_window: Optional[bool] = None
    coherence_ok: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            'min_degree': self.min_degree,
            'max_degree': self.max_degree,
            'window': list(self.window) if self.window else None,
            'coherence_limit': self.coherence_limit,
            'within_window': self.within_window,
            'coherence_ok': self.coherence_ok,
        }


@dataclass(frozen=True)
class ExpansionReport:
    """Outcome of an exhaustive (s, e)-expansion check."""

    is_expander: bool
    worst_set: FrozenSet[int]
    worst_ratio: float
    subsets_checked: int
    s: int
    e: float

    def to_dict(self) -> dict:
        return {
            'is_expander': self.is_expander,
            'worst_set': sorted(self.worst_set),
            'worst_ratio': self.worst_ratio,
            'subsets_checked': self.subsets_checked,
            's': self.s,
            'e': self.e,
        }


@dataclass(frozen=True)
class UDPCounterexample:
    """A (gamma, T) pair violating ||g_T||_1 <= rho sqrt(s) ||Phi g||_2 + kappa ||g||_1."""

    gamma: np.ndarray
    T: FrozenSet[int]
    lhs: float
    rhs: float
    strategy: str = field(default="")

    def to_dict(self) -> dict:
        return {
            'T': sorted(self.T),
            'lhs': self.lhs,
            'rhs': self.rhs,
            'strategy': self.strategy,
            'gamma_support': [int(i) + 1 for i in np.flatnonzero(self.gamma)],
        }
