"""
Validation of run configurations and empirical checks of the error bounds.
"""

from pathlib import Path
from typing import List, Sequence

import numpy as np
from tqdm import tqdm

from ..models.design import DesignScheme, SchemeKind
from ..models.lasso import LassoProblem
from ..models.reports import BoundParams, CoverageResult
from ..utils.config import RunConfig
from ..utils.exceptions import ConfigError, PreconditionError
from ..utils.helpers import STREAM_NOISE, stream_rng
from ..utils.logger import get_logger
from .bounds import CALCULATORS, run_calculator
from .design import sample_design
from .lasso import DEFAULT_MAX_ITER, DEFAULT_TOL, solve_many


logger = get_logger(__name__)

BUILTIN_MODEL = ("", "reference")
REFIT_MODES = ("same", "fresh", "none")


class RunValidator:
    """Validator for run configurations."""

    @staticmethod
    def problems(config: RunConfig) -> List[str]:
        """Every violated constraint of ``config``, empty when it is valid."""
        found = []
        if config.model not in BUILTIN_MODEL and not Path(config.model).exists():
            found.append(f"model file not found: {config.model}")
        if config.p < 0:
            found.append("p must be >= 0")

        try:
            kind = SchemeKind(config.scheme.lower())
        except ValueError:
            found.append(f"unknown scheme '{config.scheme}'")
            kind = None
        if kind is SchemeKind.BERNOULLI and not 0.0 < config.mu < 1.0:
            found.append("mu must lie in (0, 1)")
        if kind is SchemeKind.EXPANDER and not 1 <= config.d <= config.n:
            found.append("expander degree d must lie in [1, n]")

        if config.n < 1:
            found.append("n must be >= 1")
        if config.N < 2:
            found.append("N must be >= 2")
        if config.r is not None and config.r <= 0:
            found.append("r must be > 0")
        if config.r_grid is not None:
            grid = np.asarray(config.r_grid, dtype=float)
            if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) >= 0):
                found.append("r_grid must be positive and strictly decreasing")
        if config.grid_points < 1:
            found.append("grid_points must be >= 1")
        if not 0.0 < config.grid_ratio < 1.0:
            found.append("grid_ratio must lie in (0, 1)")
        if config.threshold < 0:
            found.append("threshold must be >= 0")
        if config.refit not in REFIT_MODES:
            found.append(f"refit must be one of {', '.join(REFIT_MODES)}")
        if config.calculator and config.calculator not in CALCULATORS:
            found.append(f"unknown calculator '{config.calculator}'")
        if config.alpha_max is not None and not 0.0 < config.alpha_max < 1.0:
            found.append("alpha_max must lie in (0, 1)")
        if config.workers < 1:
            found.append("workers must be >= 1")
        return found

    @classmethod
    def validate_run_config(cls, config: RunConfig) -> None:
        found = cls.problems(config)
        if found:
            raise ConfigError("; ".join(found), module="cli", details={'problems': found})

    @staticmethod
    def scheme_of(config: RunConfig) -> DesignScheme:
        kind = SchemeKind(config.scheme.lower())
        if kind is SchemeKind.BERNOULLI:
            return DesignScheme.bernoulli(config.mu)
        if kind is SchemeKind.EXPANDER:
            return DesignScheme.expander(config.d)
        return DesignScheme.rademacher()


class BoundValidator:
    """Empirical coverage of a bound calculator on synthetic regressions.

    Each trial draws a fresh design, sets E = Phi S + sigma * eps with
    standard Gaussian eps, solves the LASSO at the calculator's penalty and
    records ||S_hat - S||_inf.
    """

    def __init__(self, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 show_progress: bool = False, workers: int = 1):
        self.tol = tol
        self.max_iter = max_iter
        self.workers = workers
        self.show_progress = show_progress

    def synthetic_coverage(self, S: Sequence[float], scheme: DesignScheme, params: BoundParams,
                           calculator: str = 'rademacher_bound', trials: int = 200,
                           seed: int = 0) -> CoverageResult:
        S = np.asarray(S, dtype=float)
        params.require("synthetic_coverage", 'n', 'sigma')
        if params.p is not None and params.p != S.shape[0]:
            raise PreconditionError(f"S has length {S.shape[0]} but p={params.p}",
                                    module="bounds")
        if trials < 1:
            raise PreconditionError("coverage needs trials >= 1", module="bounds")

        report = run_calculator(calculator, params.with_values(p=S.shape[0]))
        n, p, sigma = params.n, S.shape[0], params.sigma

        problems = []
        for k in tqdm(range(trials), desc="coverage", disable=not self.show_progress):
            trial_seed = seed + k
            design = sample_design(scheme, n, p, trial_seed)
            noise = sigma * stream_rng(trial_seed, STREAM_NOISE).standard_normal(n)
            problems.append(LassoProblem(E=design.as_float() @ S + noise, phi=design, r=report.r))

        solutions = solve_many(problems, self.tol, self.max_iter, workers=self.workers)
        errors = [float(np.max(np.abs(solution.s_hat - S))) for solution in solutions]

        failures = int(sum(err > report.t for err in errors))
        result = CoverageResult(trials=trials, failures=failures, alpha=report.alpha,
                                t=report.t, max_errors=tuple(errors))
        logger.info(f"{calculator} coverage: {failures}/{trials} runs exceeded t={report.t:.4g} "
                    f"(limit rate {result.limit:.4g})")
        return result
