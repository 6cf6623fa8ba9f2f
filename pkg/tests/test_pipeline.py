"""
Tests for the end-to-end pipeline and the reference experiments.
"""

import json

import pytest

from src.core.bounds import rademacher_bound
from src.core.experiments import ExperimentRunner
from src.core.pipeline import RPFPipeline, support_ordering
from src.core.validator import RunValidator
from src.models.reports import BoundParams
from src.utils.config import RunConfig
from src.utils.exceptions import ConfigError


def small_run(tmp_path, **overrides):
    values = dict(model="reference", p=20, scheme="rademacher", n=30, N=4000, seed=3,
                  grid_points=30, grid_ratio=0.01, threshold=0.05,
                  output=str(tmp_path / "out"))
    values.update(overrides)
    return RunConfig(**values)


class TestRunValidator:
    """Test run config validation."""

    def test_valid(self, tmp_path):
        assert RunValidator.problems(small_run(tmp_path)) == []

    def test_collects_every_problem(self, tmp_path):
        run = small_run(tmp_path, model="missing.txt", n=0, refit="twice", grid_ratio=2.0)
        with pytest.raises(ConfigError) as info:
            RunValidator.validate_run_config(run)
        assert len(info.value.details['problems']) == 4

    def test_scheme_of(self, tmp_path):
        scheme = RunValidator.scheme_of(small_run(tmp_path, scheme="expander", d=3))
        assert scheme.label == "expander:3"


class TestPipeline:
    """Test a full run on the test function."""

    def test_recovers_active_set(self, tmp_path):
        result = RPFPipeline().run(small_run(tmp_path))
        assert result.recovery.support == frozenset({1, 2, 3})
        assert support_ordering(result) == [3, 1, 2]
        assert result.eval_count == 61 * 4000
        assert result.evaluations()['matches_formula']
        assert result.recovery.truth_comparison.exact

    def test_refit_values(self, tmp_path):
        result = RPFPipeline().run(small_run(tmp_path, refit="same"))
        refit = result.recovery.refit_values
        for label, value in [(1, 94 / 529), (2, 60 / 529), (3, 375 / 529)]:
            assert refit[label - 1] == pytest.approx(value, abs=0.05)

    def test_fresh_refit_counts_evaluations(self, tmp_path):
        result = RPFPipeline().run(small_run(tmp_path, refit="fresh", N=1000))
        assert result.refit_evaluations == 61 * 1000

    def test_calculator_sets_threshold(self, tmp_path):
        run = small_run(tmp_path, calculator="rademacher_bound", s=3, A=3.0, delta_prime=2.0)
        result = RPFPipeline().run(run)
        assert result.bound is not None
        assert result.recovery.threshold == pytest.approx(result.bound.t)

    def test_dimension_override_reaches_the_bound(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("p 40\n1 0 4 1\n2 0 4\n3 0 10\n")
        run = small_run(tmp_path, model=str(path), p=20, calculator="rademacher_bound",
                        s=3, A=3.0, delta_prime=2.0)
        result = RPFPipeline().run(run)
        assert result.model.p == result.design.p == 20
        expected = rademacher_bound(BoundParams(p=20, s=3, n=30, sigma=result.noise.sigma,
                                                A=3.0, delta_prime=2.0))
        assert result.bound.t == pytest.approx(expected.t)

    def test_model_file_dimension_reaches_the_bound(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("p 40\n1 0 4 1\n2 0 4\n3 0 10\n")
        run = small_run(tmp_path, model=str(path), p=0, calculator="rademacher_bound",
                        s=3, A=3.0, delta_prime=2.0)
        result = RPFPipeline().run(run)
        assert result.design.p == 40
        expected = rademacher_bound(BoundParams(p=40, s=3, n=30, sigma=result.noise.sigma,
                                                A=3.0, delta_prime=2.0))
        assert result.bound.t == pytest.approx(expected.t)

    def test_distortion_bound_threshold(self, tmp_path):
        run = small_run(tmp_path, scheme="expander", d=4, n=60, e=0.1,
                        calculator="udp_linf_bound", r0=1e-4)
        result = RPFPipeline().run(run)
        assert result.bound.calculator == "udp_linf_bound"
        assert result.bound.r == result.chosen.r
        assert result.recovery.threshold == pytest.approx(result.bound.t)

    def test_out_of_range_bound_input_is_a_config_error(self, tmp_path):
        run = small_run(tmp_path, calculator="rademacher_bound", s=3, A=2.0, delta_prime=2.0)
        with pytest.raises(ConfigError, match="A must exceed"):
            RPFPipeline().bound_report(run)

    def test_artifacts(self, tmp_path):
        pipeline = RPFPipeline()
        run = small_run(tmp_path, dump_sample=True, full_path=True)
        written = pipeline.write_artifacts(run, pipeline.run(run))
        assert sorted(written) == ['E.csv', 'evaluations.json', 'manifest.json', 'path.csv',
                                   'path_full.csv', 'recovery.json', 'sample.bin']
        manifest = json.loads(written['manifest.json'].read_text())
        assert manifest['seed'] == 3
        assert len(manifest['config_hash']) == 64
        recovery = json.loads(written['recovery.json'].read_text())
        assert recovery['support'] == [1, 2, 3]

    def test_byte_identical_reruns(self, tmp_path):
        pipeline = RPFPipeline()
        outputs = []
        for name in ("first", "second"):
            run = small_run(tmp_path, output=str(tmp_path / name), N=500)
            written = pipeline.write_artifacts(run, pipeline.run(run))
            outputs.append({k: written[k].read_bytes() for k in ('E.csv', 'path.csv')})
        assert outputs[0] == outputs[1]

    def test_explicit_penalty(self, tmp_path):
        result = RPFPipeline().run(small_run(tmp_path, r=0.01))
        assert result.chosen.r == 0.01

    def test_verify_design(self, tmp_path):
        report = RPFPipeline().verify_design(
            small_run(tmp_path, scheme="expander", d=6, n=200, p=12, s=2, e=0.1))
        assert report['expansion']['s'] == 4
        assert 'udp' in report

    def test_baseline(self, tmp_path):
        payload = RPFPipeline().baseline(small_run(tmp_path, N=300))
        assert payload['one_by_one_evaluations'] == 21 * 300
        assert payload['rpf_evaluations'] == 61 * 300
        assert payload['matches_formula']


class TestExperiments:
    """Test the reference experiments and their criteria."""

    def test_rademacher_path(self, tmp_path):
        outcome = ExperimentRunner(show_progress=False).reproduce('rademacher_path', str(tmp_path))
        assert outcome.passed, outcome.to_dict()['criteria']
        assert (tmp_path / "rademacher_path" / "paths.csv").exists()

    def test_bernoulli_path(self, tmp_path):
        outcome = ExperimentRunner(show_progress=False).reproduce('bernoulli_path', str(tmp_path))
        assert outcome.passed, outcome.to_dict()['criteria']

    def test_scenario(self, tmp_path):
        outcome = ExperimentRunner(show_progress=False).reproduce('screening_scenario', str(tmp_path))
        assert outcome.passed, outcome.to_dict()['criteria']
        assert outcome.details['rpf_cost_unshared'] == 3 * 10 ** 8
        acceptance = json.loads((tmp_path / "screening_scenario" / "acceptance.json").read_text())
        assert acceptance['passed'] is True

    def test_baseline(self, tmp_path):
        outcome = ExperimentRunner(show_progress=False).reproduce('baseline', str(tmp_path))
        assert outcome.passed
        assert outcome.details['one_by_one_evaluations'] == 301 * 3000

    def test_unknown(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentRunner(show_progress=False).reproduce('fig9', str(tmp_path))
