"""Thresholded-LASSO support classification and least-squares refit."""

from typing import AbstractSet, Iterable, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..models.design import DesignMatrix
from ..models.reports import RecoveryReport, SupportComparison
from ..utils.exceptions import DimensionError, NumericalError, PreconditionError
from ..utils.helpers import index_set, positions
from ..utils.logger import get_logger


logger = get_logger(__name__)

DEFAULT_MAX_CONDITION = 1e12


def threshold_support(s_hat: np.ndarray, t: float, s_min: Optional[float] = None) -> RecoveryReport:
    """Classify inputs from a LASSO estimate.

    ``S_hat_i > t`` puts i in the support. With ``s_min`` given,
    ``S_hat_i < s_min - t`` rejects i; an index meeting both rules, or
    neither, is undecided. Without ``s_min`` everything outside the support
    is undecided.
    """
    if t < 0:
        raise PreconditionError(f"threshold must be >= 0, got {t}", module="recovery")
    s_hat = np.asarray(s_hat, dtype=float)
    p = s_hat.shape[0]
    everything = frozenset(range(1, p + 1))

    positive = index_set(np.flatnonzero(s_hat > t))
    if s_min is None:
        negative = frozenset()
    else:
        negative = index_set(np.flatnonzero(s_hat < s_min - t))

    # when s_min - t > t the two rules can both fire
    both = positive & negative
    support = positive - both
    rejected = negative - both
    undecided = everything - support - rejected

    if both:
        logger.debug(f"{len(both)} indices match both threshold rules: {sorted(both)}")
    return RecoveryReport(
        threshold=float(t),
        support=support,
        rejected=rejected,
        undecided=undecided,
        p=p,
        s_min=s_min,
    )


def refit_least_squares(E: np.ndarray, phi: DesignMatrix, support: Iterable[int],
                        max_condition: float = DEFAULT_MAX_CONDITION) -> np.ndarray:
    """Least squares of E on the support columns; zeros elsewhere.

    Solved through the normal equations with a Cholesky factorization.
    """
    E = np.asarray(E, dtype=float)
    if E.shape[0] != phi.n:
        raise DimensionError(f"E has length {E.shape[0]} but the design has n={phi.n}",
                             module="recovery")
    columns = positions(support)
    values = np.zeros(phi.p)
    if not columns:
        return values
    if columns[0] < 0 or columns[-1] >= phi.p:
        raise DimensionError(f"support labels outside [1, {phi.p}]", module="recovery")
    if len(columns) > phi.n:
        raise NumericalError(
            f"support of size {len(columns)} exceeds n={phi.n}; the refit is rank deficient",
            module="recovery", details={'support_size': len(columns), 'n': phi.n},
        )

    restricted = phi.as_float()[:, columns]
    gram = restricted.T @ restricted
    condition = float(np.linalg.cond(gram))
    if not np.isfinite(condition) or condition > max_condition:
        raise NumericalError(
            f"restricted Gram matrix is ill-conditioned (condition number {condition:.3e})",
            module="recovery", details={'condition_number': condition},
        )
    try:
        factor = cho_factor(gram)
    except LinAlgError as e:
        raise NumericalError(f"Cholesky factorization failed: {e}", module="recovery",
                             details={'condition_number': condition})
    values[columns] = cho_solve(factor, restricted.T @ E)
    logger.debug(f"Refit {len(columns)} coefficients (condition number {condition:.3e})")
    return values


def compare_support(recovered: AbstractSet[int], truth: AbstractSet[int]) -> SupportComparison:
    """True/false positives and negatives of a recovered support."""
    recovered, truth = frozenset(recovered), frozenset(truth)
    return SupportComparison(
        true_positives=len(recovered & truth),
        false_positives=len(recovered - truth),
        false_negatives=len(truth - recovered),
        exact=recovered == truth,
    )
