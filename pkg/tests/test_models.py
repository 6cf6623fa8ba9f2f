"""
Tests for data models.
"""

import numpy as np
import pytest

from src.models.additive import AdditiveModel, InputSpec, SobolVector, Term, reference_model
from src.models.design import Alphabet, DesignMatrix, DesignScheme, SchemeKind
from src.models.lasso import LassoProblem
from src.models.reports import BoundParams, BoundReport, CoverageResult, RecoveryReport
from src.models.sample import EstimatorKind, MonteCarloPlan
from src.utils.config import RunConfig
from src.utils.exceptions import ConfigError, DimensionError, PreconditionError


class TestAdditiveModel:
    """Test AdditiveModel and its parts."""

    def test_reference_model_terms(self):
        """Test the built-in three-term model."""
        model = reference_model(300)
        assert model.p == 300
        assert [t.index for t in model.terms] == [1, 2, 3]
        assert model.terms[0].coefficients == (0.0, 4.0, 1.0)

    def test_evaluate_batch(self):
        """Test evaluation at the origin and at (1, 1, 1, 0, ...)."""
        model = reference_model(10)
        X = np.zeros((2, 10))
        X[1, :3] = 1.0
        assert model.evaluate_batch(X).tolist() == [0.0, 19.0]

    def test_single_term(self):
        model = AdditiveModel.from_coefficients(4, {1: (0.0, 1.0)})
        X = np.full((1, 4), 0.3)
        assert model.evaluate_batch(X)[0] == pytest.approx(0.3)

    def test_index_out_of_range(self):
        with pytest.raises(DimensionError):
            AdditiveModel.from_coefficients(3, {4: (1.0,)})

    def test_duplicate_terms(self):
        with pytest.raises(PreconditionError):
            AdditiveModel(input=InputSpec(p=3), terms=(Term(1, (0, 1)), Term(1, (0, 2))))

    def test_input_dimension(self):
        with pytest.raises(DimensionError):
            InputSpec(p=0)


class TestSobolVector:
    """Test SobolVector accessors."""

    def test_support_and_ordering(self):
        vector = SobolVector(values=[0.2, 0.0, 0.8, 0.0])
        assert vector.support == frozenset({1, 3})
        assert vector.s == 2
        assert vector.s_min == pytest.approx(0.2)
        assert vector.ordering(vector.support) == [3, 1]
        assert vector[3] == pytest.approx(0.8)

    def test_values_are_read_only(self):
        vector = SobolVector(values=[0.5, 0.5])
        with pytest.raises(ValueError):
            vector.values[0] = 1.0


class TestDesignModels:
    """Test design schemes and matrices."""

    def test_scheme_labels(self):
        assert DesignScheme.bernoulli(0.5).label == "bernoulli:0.5"
        assert DesignScheme.expander(3).label == "expander:3"
        assert DesignScheme.from_label("expander:3") == DesignScheme.expander(3)
        assert DesignScheme.from_label("rademacher").kind is SchemeKind.RADEMACHER

    def test_scheme_validation(self):
        with pytest.raises(PreconditionError):
            DesignScheme.bernoulli(1.0)
        with pytest.raises(PreconditionError):
            DesignScheme("gaussian")

    def test_alphabet(self):
        assert DesignScheme.rademacher().alphabet is Alphabet.SIGNED
        assert DesignScheme.bernoulli(0.3).alphabet is Alphabet.BINARY

    def test_entries_checked_against_alphabet(self):
        with pytest.raises(PreconditionError):
            DesignMatrix(entries=np.array([[0, 1]]), scheme=DesignScheme.rademacher())

    def test_expander_regularity_checked(self):
        with pytest.raises(PreconditionError):
            DesignMatrix(entries=np.array([[1, 1], [1, 0]]), scheme=DesignScheme.expander(2))

    def test_frozen_mask(self, orthogonal_design):
        assert orthogonal_design.frozen_mask.tolist() == [[True, True], [True, False]]


class TestMonteCarloPlan:
    """Test evaluation-cost formulas."""

    def test_costs(self):
        assert MonteCarloPlan(N=3000, seed=1).evaluation_cost(30) == 93000
        assert MonteCarloPlan(N=2000, seed=1, kind=EstimatorKind.DELTA).evaluation_cost(30) == 122000

    def test_minimum_size(self):
        with pytest.raises(PreconditionError):
            MonteCarloPlan(N=1, seed=0)


class TestReports:
    """Test bound and recovery reports."""

    def test_lasso_problem_validation(self, orthogonal_design):
        with pytest.raises(PreconditionError):
            LassoProblem(E=[1.0, 2.0], phi=orthogonal_design, r=0.0)
        with pytest.raises(DimensionError):
            LassoProblem(E=[1.0, 2.0, 3.0], phi=orthogonal_design, r=0.1)

    def test_bound_params_require(self):
        with pytest.raises(PreconditionError, match="sigma"):
            BoundParams(p=10, s=1).require("calc", 'p', 's', 'sigma')

    def test_bound_report_flat_dict(self):
        report = BoundReport(r=0.1, r_min=0.1, t=0.3, alpha=1.2, extras={'delta': 0.5})
        flat = report.to_flat_dict()
        assert flat['vacuous'] is True
        assert flat['extras.delta'] == 0.5

    def test_negative_threshold_rejected(self):
        with pytest.raises(PreconditionError):
            BoundReport(r=0.1, r_min=0.1, t=-1.0, alpha=0.1)

    def test_recovery_partition(self):
        with pytest.raises(PreconditionError):
            RecoveryReport(threshold=0.1, support=frozenset({1}), rejected=frozenset({1, 2}),
                           undecided=frozenset(), p=2)

    def test_recovery_to_dict(self):
        report = RecoveryReport(threshold=0.1, support=frozenset({2}), rejected=frozenset(),
                                undecided=frozenset({1, 3}), p=3)
        payload = report.with_refit(np.array([0.0, 0.7, 0.0])).to_dict()
        assert payload['support'] == [2]
        assert payload['undecided'] == [1, 3]
        assert payload['refit_values'] == [[2, 0.7]]

    def test_coverage_limit(self):
        result = CoverageResult(trials=200, failures=10, alpha=0.02, t=0.1)
        assert result.limit == pytest.approx(0.02 + 3 * 0.01)
        assert result.failure_rate == pytest.approx(0.05)
        assert result.passed


class TestRunConfig:
    """Test key=value run configs."""

    def test_load_with_overrides(self, run_file):
        path = run_file(scheme="bernoulli", mu=0.25, n=12, r_grid="0.5,0.2,0.1")
        config = RunConfig.load(path, {'n': '40', 'full-path': 'yes'})
        assert config.scheme == "bernoulli"
        assert config.mu == 0.25
        assert config.n == 40
        assert config.full_path is True
        assert config.r_grid == (0.5, 0.2, 0.1)

    def test_unknown_key(self, run_file):
        with pytest.raises(ConfigError):
            RunConfig.load(run_file(colour="blue"))

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            RunConfig.from_pairs({'n': 'thirty'})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig.load(str(tmp_path / "absent.cfg"))

    def test_optional_values(self):
        config = RunConfig.from_pairs({'r': 'none', 'sigma': '0.01'})
        assert config.r is None
        assert config.sigma == 0.01
        assert config.to_pairs()['r'] == ""
