"""Pick-freeze Monte Carlo engine and Sobol estimators."""

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Protocol, Tuple

import numpy as np

from ..models.additive import SobolVector
from ..models.design import DesignMatrix
from ..models.sample import (
    EstimateVector,
    EstimatorKind,
    MonteCarloPlan,
    NoiseEstimate,
    PickFreezeSample,
)
from ..utils.exceptions import DegenerateVarianceError, DimensionError, PreconditionError
from ..utils.helpers import STREAM_X, STREAM_X_PRIME, stream_rng
from ..utils.logger import get_logger


logger = get_logger(__name__)

DEFAULT_BLOCK_SIZE = 4096
DEFAULT_TOLERANCE = 1e-12


class ModelFunction(Protocol):
    """Anything evaluable on an (N, p) array of inputs."""

    @property
    def p(self) -> int: ...

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray: ...


class CountingModel:
    """Wraps a model and counts every evaluated input point."""

    def __init__(self, model: ModelFunction):
        self.model = model
        self._count = 0
        self._lock = threading.Lock()

    @property
    def p(self) -> int:
        return self.model.p

    @property
    def count(self) -> int:
        return self._count

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        values = self.model.evaluate_batch(X)
        with self._lock:
            self._count += int(np.shape(X)[0])
        return values


def draw_inputs(seed: int, stream: int, N: int, p: int,
                block_size: int = DEFAULT_BLOCK_SIZE) -> np.ndarray:
    """N x p uniform inputs; rows are drawn in blocks, one RNG stream per block."""
    blocks = []
    for b, start in enumerate(range(0, N, block_size)):
        rows = min(block_size, N - start)
        blocks.append(stream_rng(seed, stream, b).random((rows, p)))
    return np.vstack(blocks)


def simulate(model: ModelFunction, design: DesignMatrix, plan: MonteCarloPlan,
             workers: int = 1, block_size: int = DEFAULT_BLOCK_SIZE) -> PickFreezeSample:
    """Generate Y, Y^{F_j} (and Y^{F_j^c} for delta plans) from one shared (X, X') draw."""
    if design.p != model.p:
        raise DimensionError(f"design has p={design.p} but the model has p={model.p}",
                             module="pickfreeze")

    counter = CountingModel(model)
    X = draw_inputs(plan.seed, STREAM_X, plan.N, model.p, block_size)
    X_prime = draw_inputs(plan.seed, STREAM_X_PRIME, plan.N, model.p, block_size)
    masks = design.frozen_mask
    with_complement = plan.kind is EstimatorKind.DELTA

    def replicate(j: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        mask = masks[j]
        frozen = counter.evaluate_batch(np.where(mask, X, X_prime))
        complement = None
        if with_complement:
            complement = counter.evaluate_batch(np.where(mask, X_prime, X))
        return frozen, complement

    y = counter.evaluate_batch(X)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(replicate, range(design.n)))
    else:
        rows = [replicate(j) for j in range(design.n)]

    y_frozen = np.vstack([frozen for frozen, _ in rows])
    y_complement = np.vstack([c for _, c in rows]) if with_complement else None

    expected = plan.evaluation_cost(design.n)
    if counter.count != expected:
        raise PreconditionError(
            f"evaluation count {counter.count} differs from the cost formula {expected}",
            module="pickfreeze",
        )
    logger.info(f"Simulated {design.n} pick-freeze rows at N={plan.N} "
                f"({counter.count} model evaluations)")

    return PickFreezeSample(
        y=y,
        y_frozen=y_frozen,
        plan=plan,
        y_frozen_complement=y_complement,
        eval_count=counter.count,
    )


def closed_ratio(y: np.ndarray, y_frozen: np.ndarray,
                 tolerance: float = DEFAULT_TOLERANCE) -> float:
    """Pick-freeze estimator of S_F from paired outputs (Y_k, Y_k^F)."""
    mean = np.mean((y + y_frozen) / 2.0)
    numerator = np.mean(y * y_frozen) - mean ** 2
    denominator = np.mean((y ** 2 + y_frozen ** 2) / 2.0) - mean ** 2

    spread = max(np.max(y), np.max(y_frozen)) - min(np.min(y), np.min(y_frozen))
    if denominator <= tolerance * spread ** 2 or denominator <= 0.0:
        raise DegenerateVarianceError(
            f"empirical variance {denominator:.3e} is degenerate", module="pickfreeze"
        )
    return float(numerator / denominator)


def _check_row(sample: PickFreezeSample, j: int) -> None:
    if not 0 <= j < sample.n:
        raise DimensionError(f"row {j} outside [0, {sample.n})", module="pickfreeze")


def estimate_closed(sample: PickFreezeSample, j: int,
                    tolerance: float = DEFAULT_TOLERANCE) -> float:
    """S_hat_{F_j} for 0-based row ``j``."""
    _check_row(sample, j)
    return closed_ratio(sample.y, sample.y_frozen[j], tolerance)


def estimate_delta(sample: PickFreezeSample, j: int,
                   tolerance: float = DEFAULT_TOLERANCE) -> float:
    """S_hat_{F_j} - S_hat_{F_j^c} for 0-based row ``j``."""
    if not sample.has_complement:
        raise PreconditionError("delta estimator needs complement replications",
                                module="pickfreeze")
    _check_row(sample, j)
    return (closed_ratio(sample.y, sample.y_frozen[j], tolerance)
            - closed_ratio(sample.y, sample.y_frozen_complement[j], tolerance))


def estimate_vector(sample: PickFreezeSample, design: Optional[DesignMatrix] = None,
                    tolerance: float = DEFAULT_TOLERANCE) -> EstimateVector:
    """E_j for every row, closed or delta according to the plan."""
    estimator = estimate_delta if sample.plan.kind is EstimatorKind.DELTA else estimate_closed
    values = np.empty(sample.n)
    for j in range(sample.n):
        try:
            values[j] = estimator(sample, j, tolerance)
        except DegenerateVarianceError as e:
            raise DegenerateVarianceError(f"row {j + 1}: {e.message}", module="pickfreeze",
                                          details={'row': j + 1})
    return EstimateVector(values=values, plan=sample.plan, design=design)


def _jackknife_closed(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Leave-one-out values of the closed estimator."""
    N = a.shape[0]
    m_terms = (a + b) / 2.0
    xy_terms = a * b
    sq_terms = (a ** 2 + b ** 2) / 2.0
    mean = (m_terms.sum() - m_terms) / (N - 1)
    numerator = (xy_terms.sum() - xy_terms) / (N - 1) - mean ** 2
    denominator = (sq_terms.sum() - sq_terms) / (N - 1) - mean ** 2
    with np.errstate(divide='ignore', invalid='ignore'):
        return numerator / denominator


def noise_scale(sample: PickFreezeSample) -> NoiseEstimate:
    """Per-row jackknife standard errors of E and their maximum."""
    N = sample.N
    per_row = np.empty(sample.n)
    for j in range(sample.n):
        loo = _jackknife_closed(sample.y, sample.y_frozen[j])
        if sample.plan.kind is EstimatorKind.DELTA and sample.has_complement:
            loo = loo - _jackknife_closed(sample.y, sample.y_frozen_complement[j])
        if not np.all(np.isfinite(loo)):
            raise DegenerateVarianceError(f"row {j + 1}: jackknife variance is degenerate",
                                          module="pickfreeze", details={'row': j + 1})
        per_row[j] = np.sqrt((N - 1) / N * np.sum((loo - loo.mean()) ** 2))
    per_row.setflags(write=False)
    return NoiseEstimate(per_row=per_row, sigma=float(per_row.max()))


def estimate_single(model: ModelFunction, i: int, N: int, seed: int,
                    tolerance: float = DEFAULT_TOLERANCE) -> float:
    """Classical one-variable pick-freeze S_hat_i (cost 2N)."""
    if not 1 <= i <= model.p:
        raise DimensionError(f"label {i} outside [1, {model.p}]", module="pickfreeze")
    plan = MonteCarloPlan(N=N, seed=seed)
    X = draw_inputs(plan.seed, STREAM_X, N, model.p)
    X_prime = draw_inputs(plan.seed, STREAM_X_PRIME, N, model.p)
    X_prime[:, i - 1] = X[:, i - 1]
    return closed_ratio(model.evaluate_batch(X), model.evaluate_batch(X_prime), tolerance)


@dataclass(frozen=True)
class OneByOneResult:
    """Outcome of the classical sweep over every input."""

    indices: SobolVector
    eval_count: int
    N: int


def one_by_one(model: ModelFunction, N: int, seed: int,
               tolerance: float = DEFAULT_TOLERANCE) -> OneByOneResult:
    """Estimate every S_i with a shared Y; costs (p + 1) N evaluations."""
    plan = MonteCarloPlan(N=N, seed=seed)
    counter = CountingModel(model)
    X = draw_inputs(plan.seed, STREAM_X, N, model.p)
    X_prime = draw_inputs(plan.seed, STREAM_X_PRIME, N, model.p)
    y = counter.evaluate_batch(X)

    values = np.empty(model.p)
    for i in range(model.p):
        mixed = X_prime.copy()
        mixed[:, i] = X[:, i]
        values[i] = closed_ratio(y, counter.evaluate_batch(mixed), tolerance)

    logger.info(f"One-by-one sweep over p={model.p} inputs used {counter.count} evaluations")
    return OneByOneResult(
        indices=SobolVector(values=values, estimated=True),
        eval_count=counter.count,
        N=N,
    )
