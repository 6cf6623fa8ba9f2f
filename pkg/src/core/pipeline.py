"""Main orchestration of randomized pick-freeze runs."""

import os
import tempfile
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ..models.additive import AdditiveModel, reference_model
from ..models.design import Alphabet, DesignMatrix, SchemeKind
from ..models.lasso import LassoProblem
from ..models.reports import BoundParams, BoundReport
from ..models.run import RunResult
from ..models.sample import EstimatorKind, MonteCarloPlan
from ..utils.config import Config, RunConfig
from ..utils.exceptions import BudgetExceededError, PreconditionError, reported_as_config_error
from ..utils.helpers import config_hash, environment_versions, ensure_directory, write_json
from ..utils.logger import get_logger
from . import serialization
from .bounds import expander_udp_constants, optimize_params, run_calculator
from .design import (
    degree_stats,
    falsify_udp,
    freeze_sets,
    gram_stats,
    sample_design,
    verify_expander,
)
from .lasso import default_grid, path, r_max, solve
from .pickfreeze import estimate_vector, noise_scale, one_by_one, simulate
from .recovery import compare_support, refit_least_squares, threshold_support
from .sobol import analytic_sobol
from .validator import BUILTIN_MODEL, RunValidator


DEFAULT_REFERENCE_P = 300


class RPFPipeline:
    """Runs the six steps of the method and writes their artifacts.

    1. sample Phi, 2. read off F_1..F_n, 3. simulate (Y, Y^{F_j}),
    4. form E, 5. solve the LASSO path, 6. threshold (and refit) S_hat.
    """

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config()
        self.logger = get_logger(__name__)
        self.lasso_config = self.config.get_lasso_config()
        self.pickfreeze_config = self.config.get_pickfreeze_config()

    # Inputs ---------------------------------------------------------------

    def load_model(self, run: RunConfig) -> AdditiveModel:
        if run.model in BUILTIN_MODEL:
            return reference_model(run.p or DEFAULT_REFERENCE_P)
        return serialization.load_model(run.model, p=run.p or None)

    def bound_params(self, run: RunConfig, **known) -> BoundParams:
        """Calculator inputs from the run config; ``known`` fills the gaps."""
        values = {
            'p': run.p or None, 's': run.s or None, 'n': run.n, 'N': run.N,
            'mu': run.mu, 'delta': run.delta, 'delta_prime': run.delta_prime, 'A': run.A,
            'sigma': run.sigma, 'c': run.c, 'C1': run.C1, 'C2': run.C2, 'C3': run.C3,
            'd': run.d or None, 'e': run.e, 'r': run.r, 'rho': run.rho, 'kappa': run.kappa,
            'theta1': run.theta1, 'theta2': run.theta2, 'r0': run.r0,
        }
        for key, value in known.items():
            if values.get(key) is None:
                values[key] = value
        return BoundParams(**values)

    def bound_report(self, run: RunConfig, **known) -> BoundReport:
        """Evaluate (or, with ``alpha_max``, optimize) the configured calculator."""
        params = self.bound_params(run, **known)
        with reported_as_config_error():
            if run.alpha_max is not None:
                bounds_config = self.config.get('bounds', {})
                return optimize_params(
                    run.calculator, params, run.alpha_max,
                    grid_points=int(bounds_config.get('optimizer_grid', 200)),
                    A_max=float(bounds_config.get('A_max', 50.0)),
                    free_max=float(bounds_config.get('delta_prime_max', 200.0)),
                )
            return run_calculator(run.calculator, params, snr_mode=run.snr_mode)

    # Steps ----------------------------------------------------------------

    def sample(self, run: RunConfig, model: AdditiveModel, seed: int, design: DesignMatrix):
        plan = MonteCarloPlan.for_design(design, run.N, seed)
        return simulate(model, design, plan, workers=run.workers,
                        block_size=int(self.pickfreeze_config.get('block_size', 4096)))

    def run(self, run: RunConfig, recover: bool = True) -> RunResult:
        """Compute everything for ``run``; nothing is written here."""
        RunValidator.validate_run_config(run)
        tol = float(self.lasso_config.get('tol', 1e-9))
        max_iter = int(self.lasso_config.get('max_iter', 100_000))
        degenerate = float(self.pickfreeze_config.get('degenerate_tolerance', 1e-12))

        model = self.load_model(run)
        scheme = RunValidator.scheme_of(run)
        self.logger.info(f"Run: {model}, scheme={scheme.label}, n={run.n}, N={run.N}, seed={run.seed}")

        design = sample_design(scheme, run.n, model.p, run.seed, workers=run.workers)
        sets = freeze_sets(design)
        self.logger.debug(f"Freeze-set sizes: {[len(F) for F in sets]}")

        sample = self.sample(run, model, run.seed, design)
        estimates = estimate_vector(sample, design, degenerate)
        noise = noise_scale(sample)

        E = estimates.values
        top = r_max(E, design)
        if run.r_grid is not None:
            grid = np.asarray(run.r_grid, dtype=float)
        else:
            grid = default_grid(top, run.grid_points, run.grid_ratio)
        solutions = path(E, design, grid, tol=tol, max_iter=max_iter)

        if run.r is not None:
            chosen = solve(LassoProblem(E=E, phi=design, r=run.r), tol=tol, max_iter=max_iter)
        else:
            chosen = min(solutions, key=lambda s: s.r)

        truth = analytic_sobol(model) if model.input.all_uniform else None
        result = RunResult(model=model, design=design, sample=sample, estimates=estimates,
                           noise=noise, solutions=solutions, chosen=chosen, truth=truth)
        result.warnings.extend(f"LASSO did not converge at r={s.r:.6g}"
                               for s in solutions + [chosen] if not s.converged)
        if recover:
            self._recover(run, result)
        return result

    def _recover(self, run: RunConfig, result: RunResult) -> None:
        threshold = run.threshold
        if run.calculator:
            known = {'p': result.model.p, 'n': result.design.n, 'sigma': result.noise.sigma}
            if result.truth is not None:
                known['s'] = result.truth.s
            if result.design.scheme.kind is SchemeKind.EXPANDER:
                known['d'] = result.design.scheme.d
            if run.calculator == 'udp_linf_bound':
                stats = gram_stats(result.design)
                known.update(r=result.chosen.r, theta1=stats.theta1, theta2=stats.theta2)
                if result.design.scheme.kind is SchemeKind.EXPANDER and run.e is not None:
                    with reported_as_config_error():
                        rho, kappa = expander_udp_constants(result.design.scheme.d, run.e)
                    known.update(rho=rho, kappa=kappa)
            result.bound = self.bound_report(replace(run, r=None, p=result.model.p), **known)
            threshold = result.bound.t
            self.logger.info(f"Threshold from {run.calculator}: t={threshold:.4g}")

        recovery = threshold_support(result.chosen.s_hat, threshold, run.s_min)
        if run.refit != "none" and recovery.support:
            E = result.estimates.values
            if run.refit == "fresh":
                fresh = self.sample(run, result.model, run.seed + 1, result.design)
                E = estimate_vector(fresh, result.design,
                                    float(self.pickfreeze_config.get('degenerate_tolerance',
                                                                     1e-12))).values
                result.refit_evaluations = fresh.eval_count
            recovery_config = self.config.get_recovery_config()
            max_condition = float(recovery_config.get('max_condition_number', 1e12))
            recovery = recovery.with_refit(
                refit_least_squares(E, result.design, recovery.support, max_condition))
        if result.truth is not None:
            recovery = recovery.with_truth(compare_support(recovery.support, result.truth.support))
        result.recovery = recovery
        self.logger.info(f"Recovered support {sorted(recovery.support)} at t={threshold:.4g}")

    # Artifacts ------------------------------------------------------------

    def manifest(self, run: RunConfig) -> dict:
        pairs = run.to_pairs()
        return {
            'config': pairs,
            'config_hash': config_hash(pairs),
            'seed': run.seed,
            'versions': environment_versions(),
        }

    def write_artifacts(self, run: RunConfig, result: RunResult,
                        output_dir: Optional[str] = None) -> Dict[str, Path]:
        """Write every artifact of ``result``; files appear only once all are complete."""
        target = ensure_directory(output_dir or run.output)
        written: Dict[str, Path] = {}
        with tempfile.TemporaryDirectory(dir=target, prefix=".partial-") as staging:
            staging = Path(staging)
            serialization.write_estimates(result.estimates.values, staging / "E.csv")
            serialization.write_path(result.solutions, staging / "path.csv")
            if run.full_path:
                serialization.write_path(result.solutions, staging / "path_full.csv", full=True)
            if result.recovery is not None:
                serialization.write_recovery(result.recovery, staging / "recovery.json")
                write_json(staging / "evaluations.json", result.evaluations())
            if result.bound is not None:
                write_json(staging / "bounds.json", result.bound.to_flat_dict())
            if run.dump_sample:
                serialization.dump_sample(result.sample, staging / "sample.bin")
            write_json(staging / "manifest.json", self.manifest(run))

            for staged in sorted(staging.iterdir()):
                final = target / staged.name
                os.replace(staged, final)
                written[staged.name] = final
        self.logger.info(f"Wrote {len(written)} artifacts to {target}")
        return written

    # Auxiliary commands ---------------------------------------------------

    def verify_design(self, run: RunConfig) -> dict:
        """Gram statistics, degrees, expansion and a UDP falsification run."""
        RunValidator.validate_run_config(run)
        design_config = self.config.get_design_config()
        p = run.p or DEFAULT_REFERENCE_P
        design = sample_design(RunValidator.scheme_of(run), run.n, p, run.seed,
                               workers=run.workers)
        report: dict = {'design': str(design), 'gram': gram_stats(design).to_dict()}

        if design.alphabet is Alphabet.BINARY:
            report['degrees'] = degree_stats(design, c=run.c).to_dict()

        s = run.s or 1
        rho, kappa = run.rho, run.kappa
        if design.scheme.kind is SchemeKind.EXPANDER and run.e is not None:
            try:
                report['expansion'] = verify_expander(
                    design, 2 * s, run.e,
                    budget=int(design_config.get('expander_budget', 2_000_000))).to_dict()
            except BudgetExceededError as e:
                report['expansion'] = {'skipped': e.message}
            if rho is None or kappa is None:
                with reported_as_config_error():
                    rho, kappa = expander_udp_constants(design.scheme.d, run.e)

        if rho is not None and kappa is not None and 0.0 < kappa < 0.5:
            found = falsify_udp(design, s, rho, kappa,
                                int(design_config.get('udp_trials', 10_000)), run.seed)
            report['udp'] = {'rho': rho, 'kappa': kappa, 'violated': found is not None,
                             'counterexample': found.to_dict() if found else None}
        return report

    def baseline(self, run: RunConfig) -> dict:
        """Cost of the one-by-one sweep against the randomized scheme."""
        RunValidator.validate_run_config(run)
        model = self.load_model(run)
        result = one_by_one(model, run.N, run.seed)
        kind = EstimatorKind.for_alphabet(RunValidator.scheme_of(run).alphabet)
        rpf_plan = MonteCarloPlan(N=run.N, seed=run.seed, kind=kind)
        payload = {
            'p': model.p,
            'N': run.N,
            'one_by_one_evaluations': result.eval_count,
            'one_by_one_formula': (model.p + 1) * run.N,
            'rpf_evaluations': rpf_plan.evaluation_cost(run.n),
            'n': run.n,
            'indices': result.indices.values.tolist(),
        }
        payload['matches_formula'] = payload['one_by_one_evaluations'] == payload['one_by_one_formula']
        return payload


def support_ordering(result: RunResult) -> List[int]:
    """Support labels of the chosen solution ordered by decreasing estimate."""
    if result.recovery is None:
        raise PreconditionError("run has no recovery report", module="cli")
    values = result.chosen.s_hat
    return sorted(result.recovery.support, key=lambda i: -values[i - 1])
