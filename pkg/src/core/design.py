"""Design sampling, freeze-set encoding and design property checks."""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import FrozenSet, List, Optional, Sequence

import numpy as np
from scipy.special import comb

from ..models.design import (
    Alphabet,
    DegreeStats,
    DesignMatrix,
    DesignScheme,
    ExpansionReport,
    GramStats,
    SchemeKind,
    UDPCounterexample,
)
from ..utils.exceptions import BudgetExceededError, DimensionError, PreconditionError
from ..utils.helpers import STREAM_DESIGN, STREAM_UDP, index_set, stream_rng
from ..utils.logger import get_logger


logger = get_logger(__name__)

DEFAULT_EXPANDER_BUDGET = 2_000_000


def _sample_column(scheme: DesignScheme, n: int, seed: int, column: int) -> np.ndarray:
    rng = stream_rng(seed, STREAM_DESIGN, column)
    if scheme.kind is SchemeKind.BERNOULLI:
        return (rng.random(n) < scheme.mu).astype(np.int8)
    if scheme.kind is SchemeKind.RADEMACHER:
        return (2 * rng.integers(0, 2, size=n) - 1).astype(np.int8)
    col = np.zeros(n, dtype=np.int8)
    col[rng.choice(n, size=scheme.d, replace=False)] = 1
    return col


def sample_design(scheme: DesignScheme, n: int, p: int, seed: int,
                  workers: int = 1) -> DesignMatrix:
    """Draw an n x p design; column i comes from its own ``(seed, i)`` stream."""
    if n < 1 or p < 1:
        raise DimensionError(f"design needs n, p >= 1, got n={n}, p={p}", module="design")
    if scheme.kind is SchemeKind.EXPANDER and scheme.d > n:
        raise PreconditionError(f"left degree d={scheme.d} exceeds n={n}", module="design")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(lambda i: _sample_column(scheme, n, seed, i), range(p)))
    else:
        columns = [_sample_column(scheme, n, seed, i) for i in range(p)]

    design = DesignMatrix(entries=np.column_stack(columns), scheme=scheme, seed=seed)
    logger.info(f"Sampled {design}")
    return design


def freeze_sets(design: DesignMatrix) -> List[FrozenSet[int]]:
    """F_j = {i : Phi_ji = 1} as 1-based labels, for both alphabets."""
    return [index_set(np.flatnonzero(row)) for row in design.frozen_mask]


def design_from_freeze_sets(sets: Sequence[FrozenSet[int]], p: int,
                            scheme: DesignScheme, seed: int = 0) -> DesignMatrix:
    """Inverse of :func:`freeze_sets`: rebuild Phi from F_1..F_n."""
    low, high = scheme.alphabet.values
    entries = np.full((len(sets), p), low, dtype=np.int8)
    for j, frozen in enumerate(sets):
        for i in frozen:
            if not 1 <= i <= p:
                raise DimensionError(f"label {i} outside [1, {p}]", module="design")
            entries[j, i - 1] = high
    return DesignMatrix(entries=entries, scheme=scheme, seed=seed)


def gram_stats(design: DesignMatrix) -> GramStats:
    """Exact coherence, minimal normalized column norm and diagonal range of Psi."""
    phi = design.as_float()
    psi = phi.T @ phi / design.n
    diag = np.diag(psi).copy()
    if design.p > 1:
        off = np.abs(psi - np.diag(diag))
        max_coherence = float(off.max())
    else:
        max_coherence = 0.0
    return GramStats(
        max_coherence=max_coherence,
        min_col_normsq_over_n=float(diag.min()),
        diag_range=(float(diag.min()), float(diag.max())),
    )


def coherence_threshold(c: float, C1: float, s: int) -> float:
    """Coherence level sqrt((2+c) 8 / (3 C1)) / sqrt(s) met by Rademacher designs.

    Holds with probability at least 1 - 2 p^-c once n >= C1 s ln p and
    s >= 3 (2 + c) / C1.
    """
    if C1 <= 0 or s < 1:
        raise PreconditionError("coherence threshold needs C1 > 0 and s >= 1", module="design")
    return math.sqrt((2.0 + c) * 8.0 / (3.0 * C1)) / math.sqrt(s)


def degree_stats(design: DesignMatrix, c: Optional[float] = None) -> DegreeStats:
    """Column degrees, plus the Bernoulli degree window when ``c`` is given.

    For mu = 799 (1 + c) ln p / n the degrees lie in
    [759 (1+c) ln p, 828 (1+c) ln p] and the coherence below
    879 (1 + c) ln p / n with high probability.
    """
    if design.alphabet is not Alphabet.BINARY:
        raise PreconditionError("degree statistics need a 0/1 design", module="design")
    degrees = design.entries.sum(axis=0).astype(int)
    stats = dict(
        degrees=tuple(int(v) for v in degrees),
        min_degree=int(degrees.min()),
        max_degree=int(degrees.max()),
    )
    if c is not None:
        log_p = math.log(design.p)
        window = (759.0 * (1 + c) * log_p, 828.0 * (1 + c) * log_p)
        limit = 879.0 * (1 + c) * log_p / design.n
        stats.update(
            window=window,
            coherence_limit=limit,
            within_window=bool(window[0] <= degrees.min() and degrees.max() <= window[1]),
            coherence_ok=bool(gram_stats(design).max_coherence <= limit),
        )
    return DegreeStats(**stats)


def _left_degree(design: DesignMatrix) -> int:
    if design.alphabet is not Alphabet.BINARY:
        raise PreconditionError("expansion is defined for 0/1 adjacency matrices", module="design")
    degrees = design.entries.sum(axis=0)
    if not np.all(degrees == degrees[0]) or degrees[0] == 0:
        raise PreconditionError("design is not left-regular", module="design")
    return int(degrees[0])


def verify_expander(design: DesignMatrix, s: int, e: float,
                    budget: int = DEFAULT_EXPANDER_BUDGET) -> ExpansionReport:
    """Check #N(I) >= (1 - e) d #I for every nonempty I with #I <= s.

    Subsets are enumerated depth-first so that each neighborhood is the
    union of its parent's neighborhood and one more column.
    """
    if s < 1 or not 0.0 <= e < 1.0:
        raise PreconditionError(f"need s >= 1 and 0 <= e < 1, got s={s}, e={e}", module="design")
    d = _left_degree(design)
    p = design.p
    s = min(s, p)

    total = int(sum(comb(p, k, exact=True) for k in range(1, s + 1)))
    if total > budget:
        raise BudgetExceededError(
            f"{total} subsets exceed the enumeration budget of {budget}; "
            f"use verify-design sampling mode (falsify_udp) instead",
            module="design",
        )

    columns = design.frozen_mask.T  # (p, n) neighborhoods
    worst_ratio = math.inf
    worst_set: tuple = ()
    checked = 0

    # stack of (last column, members, union of neighborhoods)
    stack = [(i, (i,), columns[i]) for i in reversed(range(p))]
    while stack:
        last, members, union = stack.pop()
        checked += 1
        ratio = int(union.sum()) / (d * len(members))
        if ratio < worst_ratio:
            worst_ratio = ratio
            worst_set = members
        if len(members) < s:
            for nxt in reversed(range(last + 1, p)):
                stack.append((nxt, members + (nxt,), union | columns[nxt]))

    is_expander = worst_ratio >= (1.0 - e) - 1e-12
    report = ExpansionReport(
        is_expander=bool(is_expander),
        worst_set=index_set(worst_set),
        worst_ratio=float(worst_ratio),
        subsets_checked=checked,
        s=s,
        e=e,
    )
    logger.debug(f"Expansion check over {checked} subsets: worst ratio {worst_ratio:.4f}")
    return report


def udp_sides(phi: np.ndarray, gamma: np.ndarray, s: int, rho: float, kappa: float):
    """Return (T, lhs, rhs) of the UDP inequality for ``gamma``.

    The worst T for a given gamma holds its s largest magnitudes.
    """
    magnitudes = np.abs(gamma)
    order = np.argsort(-magnitudes, kind='stable')[:s]
    lhs = float(magnitudes[order].sum())
    rhs = float(rho * math.sqrt(s) * np.linalg.norm(phi @ gamma) + kappa * magnitudes.sum())
    return order, lhs, rhs


def falsify_udp(design: DesignMatrix, s: int, rho: float, kappa: float,
                trials: int, seed: int) -> Optional[UDPCounterexample]:
    """Randomized search for a violation of the universal distortion property.

    Candidates are the canonical basis vectors, null-space directions of Phi,
    random s-sparse vectors, random sign patterns and dense Gaussian vectors.
    Returning ``None`` is evidence, not a certificate.
    """
    if trials < 1:
        raise PreconditionError("falsify_udp needs trials >= 1", module="design")
    if s < 1 or rho <= 0 or not 0.0 < kappa < 0.5:
        raise PreconditionError("need s >= 1, rho > 0 and 0 < kappa < 1/2", module="design")

    phi = design.as_float()
    n, p = phi.shape
    s = min(s, p)
    rng = stream_rng(seed, STREAM_UDP)
    tol = 1e-12

    def check(gamma: np.ndarray, strategy: str) -> Optional[UDPCounterexample]:
        order, lhs, rhs = udp_sides(phi, gamma, s, rho, kappa)
        if lhs > rhs + tol * max(1.0, rhs):
            return UDPCounterexample(gamma=gamma, T=index_set(order), lhs=lhs, rhs=rhs,
                                     strategy=strategy)
        return None

    for i in range(p):
        found = check(np.eye(1, p, i).ravel(), "basis")
        if found:
            return found

    # Directions in the null space have ||Phi gamma|| = 0.
    _, singular, vt = np.linalg.svd(phi, full_matrices=True)
    rank = int(np.sum(singular > singular.max() * max(n, p) * np.finfo(float).eps)) if singular.size else 0
    null_basis = vt[rank:]

    strategies = ["sparse", "signs", "dense"] + (["null"] if null_basis.shape[0] else [])
    for trial in range(trials):
        strategy = strategies[trial % len(strategies)]
        if strategy == "sparse":
            gamma = np.zeros(p)
            support = rng.choice(p, size=int(rng.integers(1, s + 1)), replace=False)
            gamma[support] = rng.standard_normal(support.size)
        elif strategy == "signs":
            gamma = np.zeros(p)
            size = int(rng.integers(1, p + 1))
            support = rng.choice(p, size=size, replace=False)
            gamma[support] = rng.choice([-1.0, 1.0], size=size)
        elif strategy == "dense":
            gamma = rng.standard_normal(p)
        else:
            gamma = null_basis.T @ rng.standard_normal(null_basis.shape[0])
        found = check(gamma, strategy)
        if found:
            logger.info(f"UDP violated after {trial + 1} trials ({strategy})")
            return found

    logger.debug(f"No UDP violation in {trials} trials")
    return None
