"""
Tests for model evaluation and the exact Sobol indices.
"""

import numpy as np
import pytest

from src.core.sobol import (
    active_set,
    analytic_sobol,
    closed_index,
    evaluate,
    term_variance,
    term_variance_quadrature,
)
from src.models.additive import AdditiveModel, reference_model
from src.utils.exceptions import DegenerateVarianceError, DimensionError


class TestEvaluate:
    """Test pointwise evaluation."""

    def test_origin(self):
        assert evaluate(reference_model(300), np.zeros(300)) == 0.0

    def test_unit_corner(self):
        x = np.zeros(300)
        x[:3] = 1.0
        assert evaluate(reference_model(300), x) == pytest.approx(19.0)

    def test_wrong_dimension(self):
        with pytest.raises(DimensionError):
            evaluate(reference_model(5), np.zeros(4))


class TestAnalyticSobol:
    """Test the exact oracle."""

    def test_reference_values(self):
        S = analytic_sobol(reference_model(300))
        assert S[1] == pytest.approx(94 / 529, abs=1e-12)
        assert S[2] == pytest.approx(60 / 529, abs=1e-12)
        assert S[3] == pytest.approx(375 / 529, abs=1e-12)
        assert np.all(S.values[3:] == 0.0)
        assert S.values.sum() == pytest.approx(1.0, abs=1e-12)

    def test_ordering(self):
        S = analytic_sobol(reference_model(300))
        assert S.ordering(S.support) == [3, 1, 2]

    def test_quadrature_agrees(self):
        model = reference_model(3)
        total = sum(term_variance_quadrature(t) for t in model.terms)
        S = analytic_sobol(model)
        for term in model.terms:
            assert term_variance_quadrature(term) / total == pytest.approx(S[term.index], abs=1e-8)

    def test_single_term(self):
        S = analytic_sobol(AdditiveModel.from_coefficients(4, {1: (0.0, 1.0)}))
        assert S.values.tolist() == [1.0, 0.0, 0.0, 0.0]

    def test_constant_model(self):
        with pytest.raises(DegenerateVarianceError):
            analytic_sobol(AdditiveModel.from_coefficients(3, {1: (2.0,)}))

    def test_term_variance(self):
        model = reference_model(3)
        assert term_variance(model.terms[0]) == pytest.approx(94 / 45, rel=1e-12)


class TestClosedIndex:
    """Test sums of indices over sets."""

    def test_pair(self):
        assert closed_index(reference_model(300), {1, 2}) == pytest.approx(154 / 529, abs=1e-12)

    def test_empty_and_full(self):
        model = reference_model(10)
        assert closed_index(model, set()) == 0.0
        assert closed_index(model, range(1, 11)) == pytest.approx(1.0, abs=1e-12)

    def test_label_out_of_range(self):
        with pytest.raises(DimensionError):
            closed_index(reference_model(10), {11})

    def test_active_set(self):
        assert active_set(reference_model(50)) == frozenset({1, 2, 3})
