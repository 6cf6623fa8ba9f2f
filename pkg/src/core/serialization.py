"""Text, CSV, JSON and binary artifacts."""

from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..models.additive import AdditiveModel, InputSpec, Term
from ..models.design import Alphabet, DesignMatrix, DesignScheme
from ..models.lasso import LassoSolution
from ..models.reports import RecoveryReport
from ..models.sample import EstimatorKind, MonteCarloPlan, PickFreezeSample
from ..utils.exceptions import ConfigError, DimensionError
from ..utils.helpers import write_json
from ..utils.logger import get_logger


logger = get_logger(__name__)

PathLike = Union[str, Path]
FLOAT_FORMAT = '%.17g'


# Models -------------------------------------------------------------------

def load_model(path: PathLike, p: Optional[int] = None) -> AdditiveModel:
    """Read ``index c0 c1 c2 ...`` lines.

    ``p`` fixes the input dimension; otherwise an optional ``p <dimension>``
    line does, and failing both the largest index is used. ``#`` starts a comment.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"model file not found: {path}", module="model")

    header_p = None
    terms: List[Term] = []
    with open(path, 'r', encoding='ascii') as f:
        for lineno, line in enumerate(f, 1):
            tokens = line.split('#', 1)[0].split()
            if not tokens:
                continue
            try:
                if tokens[0].lower() == 'p':
                    header_p = int(tokens[1])
                    continue
                terms.append(Term(index=int(tokens[0]),
                                  coefficients=tuple(float(v) for v in tokens[1:])))
            except (ValueError, IndexError) as e:
                raise ConfigError(f"{path}:{lineno}: malformed model line: {e}", module="model")

    dimension = p or header_p or max((t.index for t in terms), default=0)
    if dimension < 1:
        raise ConfigError(f"{path}: cannot determine the input dimension", module="model")
    try:
        model = AdditiveModel(input=InputSpec(p=dimension), terms=tuple(terms))
    except DimensionError as e:
        raise ConfigError(f"{path}: {e.message} (p={dimension})", module="model")
    logger.debug(f"Loaded {model} from {path}")
    return model


def save_model(model: AdditiveModel, path: PathLike) -> None:
    with open(path, 'w', encoding='ascii') as f:
        f.write(f"p {model.p}\n")
        for term in model.terms:
            f.write(" ".join([str(term.index)] + [repr(c) for c in term.coefficients]) + "\n")


# Designs ------------------------------------------------------------------

def save_design(design: DesignMatrix, path: PathLike) -> None:
    """Header ``n p alphabet seed scheme`` followed by the n rows."""
    with open(path, 'w', encoding='ascii') as f:
        f.write(f"{design.n} {design.p} {design.alphabet.value} {design.seed} "
                f"{design.scheme.label}\n")
        np.savetxt(f, design.entries, fmt='%d', delimiter=' ')


def load_design(path: PathLike) -> DesignMatrix:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"design file not found: {path}", module="design")
    with open(path, 'r', encoding='ascii') as f:
        header = f.readline().split()
        if len(header) != 5:
            raise ConfigError(f"{path}: expected header 'n p alphabet seed scheme'",
                              module="design")
        n, p = int(header[0]), int(header[1])
        alphabet, seed, scheme = Alphabet(header[2]), int(header[3]), DesignScheme.from_label(header[4])
        entries = np.loadtxt(f, dtype=np.int8, ndmin=2)
    if entries.shape != (n, p):
        raise DimensionError(f"{path}: header says {n}x{p}, body is {entries.shape}",
                             module="design")
    if scheme.alphabet is not alphabet:
        raise ConfigError(f"{path}: alphabet {alphabet.value} does not match {scheme.label}",
                          module="design")
    return DesignMatrix(entries=entries, scheme=scheme, seed=seed)


# Monte Carlo samples ------------------------------------------------------

def dump_sample(sample: PickFreezeSample, path: PathLike) -> None:
    """ASCII header ``N n kind`` then little-endian float64 arrays, row-major.

    Order: Y (N values), Y^{F_j} (n x N), and Y^{F_j^c} (n x N) for delta samples.
    """
    with open(path, 'wb') as f:
        f.write(f"{sample.N} {sample.n} {sample.plan.kind.value}\n".encode('ascii'))
        f.write(sample.y.astype('<f8').tobytes())
        f.write(np.ascontiguousarray(sample.y_frozen, dtype='<f8').tobytes())
        if sample.has_complement:
            f.write(np.ascontiguousarray(sample.y_frozen_complement, dtype='<f8').tobytes())


def load_sample(path: PathLike, seed: int = 0) -> PickFreezeSample:
    with open(path, 'rb') as f:
        N, n, kind = f.readline().decode('ascii').split()
        N, n, kind = int(N), int(n), EstimatorKind(kind)
        body = np.frombuffer(f.read(), dtype='<f8')
    rows = 2 * n + 1 if kind is EstimatorKind.DELTA else n + 1
    if body.size != rows * N:
        raise DimensionError(f"{path}: expected {rows * N} values, found {body.size}",
                             module="pickfreeze")
    body = body.reshape(rows, N)
    return PickFreezeSample(
        y=body[0],
        y_frozen=body[1:n + 1],
        plan=MonteCarloPlan(N=N, seed=seed, kind=kind),
        y_frozen_complement=body[n + 1:] if kind is EstimatorKind.DELTA else None,
        eval_count=rows * N,
    )


# CSV / JSON artifacts -----------------------------------------------------

def write_estimates(E: np.ndarray, path: PathLike) -> None:
    """``j,E_j`` with 1-based row numbers."""
    E = np.asarray(E, dtype=float)
    frame = pd.DataFrame({'j': np.arange(1, E.shape[0] + 1), 'E_j': E})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def path_frame(solutions: Sequence[LassoSolution], full: bool = False) -> pd.DataFrame:
    """Long-format path: nonzero coordinates only, or every coordinate with ``full``."""
    records = []
    for solution in solutions:
        coordinates = range(solution.s_hat.shape[0]) if full else np.flatnonzero(solution.s_hat)
        for i in coordinates:
            records.append((solution.r, int(i) + 1, float(solution.s_hat[i])))
    columns = ['r', 'i', 's_hat_i'] if full else ['r', 'index', 'value']
    return pd.DataFrame.from_records(records, columns=columns)


def write_path(solutions: Sequence[LassoSolution], path: PathLike, full: bool = False) -> None:
    path_frame(solutions, full).to_csv(path, index=False, float_format=FLOAT_FORMAT,
                                       lineterminator='\n')


def read_path(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path)


def write_recovery(report: RecoveryReport, path: PathLike) -> None:
    write_json(Path(path), report.to_dict())
