"""
Tests for design sampling and design property checks.
"""

import itertools
import math

import numpy as np
import pytest
from scipy.linalg import hadamard

from src.core.design import (
    coherence_threshold,
    degree_stats,
    design_from_freeze_sets,
    falsify_udp,
    freeze_sets,
    gram_stats,
    sample_design,
    udp_sides,
    verify_expander,
)
from src.models.design import DesignMatrix, DesignScheme
from src.utils.exceptions import BudgetExceededError, PreconditionError


def bitset_worst_ratio(design: DesignMatrix, s: int) -> float:
    """Smallest #N(I) / (d #I) over nonempty I with #I <= s, using int bitmasks."""
    masks = [int("".join("1" if v else "0" for v in column), 2) for column in design.frozen_mask.T]
    d = int(design.entries[:, 0].sum())
    worst = math.inf
    for k in range(1, s + 1):
        for subset in itertools.combinations(range(design.p), k):
            union = 0
            for i in subset:
                union |= masks[i]
            worst = min(worst, bin(union).count("1") / (d * k))
    return worst


class TestSampleDesign:
    """Test design sampling."""

    def test_bernoulli_mean(self):
        design = sample_design(DesignScheme.bernoulli(0.5), 30, 300, seed=1)
        assert 0.45 <= design.entries.mean() <= 0.55

    def test_rademacher_alphabet(self):
        design = sample_design(DesignScheme.rademacher(), 2, 2, seed=4)
        assert set(np.unique(design.entries)) <= {-1, 1}

    def test_expander_columns(self):
        design = sample_design(DesignScheme.expander(3), 10, 5, seed=7)
        assert design.entries.sum(axis=0).tolist() == [3] * 5

    def test_deterministic(self):
        a = sample_design(DesignScheme.rademacher(), 20, 40, seed=11)
        b = sample_design(DesignScheme.rademacher(), 20, 40, seed=11)
        assert np.array_equal(a.entries, b.entries)

    def test_workers_do_not_change_output(self):
        a = sample_design(DesignScheme.bernoulli(0.3), 15, 60, seed=2)
        b = sample_design(DesignScheme.bernoulli(0.3), 15, 60, seed=2, workers=4)
        assert np.array_equal(a.entries, b.entries)

    def test_expander_degree_too_large(self):
        with pytest.raises(PreconditionError):
            sample_design(DesignScheme.expander(5), 4, 10, seed=0)


class TestFreezeSets:
    """Test the row to freeze-set encoding."""

    def test_bernoulli_row(self):
        design = DesignMatrix(entries=np.array([[1, 0, 1], [0, 0, 0]]),
                              scheme=DesignScheme.bernoulli(0.5))
        assert freeze_sets(design) == [frozenset({1, 3}), frozenset()]

    def test_rademacher_row(self):
        design = DesignMatrix(entries=np.array([[1, -1, 1]]), scheme=DesignScheme.rademacher())
        assert freeze_sets(design) == [frozenset({1, 3})]

    @pytest.mark.parametrize("scheme", [DesignScheme.bernoulli(0.4), DesignScheme.rademacher()])
    def test_rebuild_from_sets(self, scheme):
        design = sample_design(scheme, 12, 25, seed=3)
        rebuilt = design_from_freeze_sets(freeze_sets(design), 25, scheme)
        assert np.array_equal(rebuilt.entries, design.entries)


class TestGramStats:
    """Test Gram matrix statistics."""

    def test_orthogonal(self, orthogonal_design):
        stats = gram_stats(orthogonal_design)
        assert stats.max_coherence == 0.0
        assert stats.theta2 == 1.0
        assert stats.diag_range == (1.0, 1.0)

    def test_identity(self):
        design = DesignMatrix(entries=np.eye(2, dtype=int), scheme=DesignScheme.bernoulli(0.5))
        stats = gram_stats(design)
        assert stats.theta2 == 0.5
        assert stats.max_coherence == 0.0

    def test_bernoulli_gram_moments(self):
        n, p, mu = 200, 100, 0.3
        phi = sample_design(DesignScheme.bernoulli(mu), n, p, seed=8).as_float()
        psi = phi.T @ phi / n
        off_diagonal = psi[~np.eye(p, dtype=bool)]
        spread = math.sqrt(mu * (1 - mu) / (n * p))
        assert np.diag(psi).mean() == pytest.approx(mu, abs=4 * spread)
        assert off_diagonal.mean() == pytest.approx(mu ** 2, abs=5 * 2 * mu * spread)

    def test_rademacher_unit_diagonal(self):
        stats = gram_stats(sample_design(DesignScheme.rademacher(), 37, 80, seed=5))
        assert stats.diag_range == (1.0, 1.0)

    def test_coherence_lemma(self):
        """n=100 >= C1 s ln p for p=200, s=1, C1=18.8; level holds w.p. 1 - 2/p."""
        c, C1, s = 1.0, 18.8, 1
        assert 100 >= C1 * s * math.log(200)
        level = coherence_threshold(c, C1, s)
        assert level == pytest.approx(math.sqrt(8 / 18.8))
        hits = sum(
            gram_stats(sample_design(DesignScheme.rademacher(), 100, 200, seed)).max_coherence <= level
            for seed in range(20)
        )
        assert hits >= 18


class TestDegreeStats:
    """Test column degrees of 0/1 designs."""

    def test_degrees(self):
        design = DesignMatrix(entries=np.array([[1, 0, 1], [1, 1, 0]]),
                              scheme=DesignScheme.bernoulli(0.5))
        stats = degree_stats(design)
        assert stats.degrees == (2, 1, 1)
        assert stats.window is None

    def test_window_reported(self):
        stats = degree_stats(sample_design(DesignScheme.bernoulli(0.5), 40, 30, seed=1), c=1.0)
        assert stats.window[0] == pytest.approx(759 * 2 * math.log(30))
        assert stats.within_window is False

    def test_signed_rejected(self, orthogonal_design):
        with pytest.raises(PreconditionError):
            degree_stats(orthogonal_design)


class TestVerifyExpander:
    """Test the exhaustive expansion check."""

    def test_identity_graph(self):
        design = DesignMatrix(entries=np.eye(6, dtype=int), scheme=DesignScheme.expander(1))
        report = verify_expander(design, 6, 0.0)
        assert report.is_expander
        assert report.worst_ratio == 1.0

    def test_collision_graph(self):
        entries = np.zeros((5, 6), dtype=int)
        entries[np.arange(5), np.arange(5)] = 1
        entries[0, 5] = 1
        design = DesignMatrix(entries=entries, scheme=DesignScheme.expander(1))
        report = verify_expander(design, 2, 0.25)
        assert not report.is_expander
        assert report.worst_set == frozenset({1, 6})
        assert report.worst_ratio == 0.5

    @pytest.mark.parametrize("p", range(6, 13))
    def test_matches_bitset_oracle(self, p):
        design = sample_design(DesignScheme.expander(3), 8, p, seed=p)
        for s, e in [(2, 0.2), (3, 0.3)]:
            report = verify_expander(design, s, e)
            worst = bitset_worst_ratio(design, s)
            assert report.worst_ratio == pytest.approx(worst)
            assert report.is_expander == (worst >= 1 - e - 1e-12)

    def test_random_graphs_expand(self):
        p, pairs, d, e = 30, 2, 4, 0.25
        n = math.ceil(12 * pairs * math.log(p))

        def passes(rows):
            return sum(
                verify_expander(sample_design(DesignScheme.expander(d), rows, p, seed), pairs, e).is_expander
                for seed in range(20)
            )

        assert passes(n) >= 15
        assert passes(12) <= 1

    def test_budget(self):
        design = sample_design(DesignScheme.expander(2), 10, 40, seed=0)
        with pytest.raises(BudgetExceededError):
            verify_expander(design, 4, 0.1, budget=1000)


class TestFalsifyUDP:
    """Test the randomized search for distortion violations."""

    def test_zero_column(self):
        entries = np.array([[1, 0], [1, 0], [0, 0]])
        design = DesignMatrix(entries=entries, scheme=DesignScheme.bernoulli(0.5))
        found = falsify_udp(design, 1, 1.0, 0.45, trials=10, seed=0)
        assert found is not None
        assert found.T == frozenset({2})

    def test_orthogonal_design_holds(self):
        design = DesignMatrix(entries=hadamard(8), scheme=DesignScheme.rademacher())
        assert falsify_udp(design, 1, 1 / math.sqrt(8) * (1 + 1e-9), 0.45,
                           trials=10_000, seed=0) is None

    def test_small_rho_violated(self):
        design = DesignMatrix(entries=hadamard(8), scheme=DesignScheme.rademacher())
        assert falsify_udp(design, 1, 0.01, 0.1, trials=10, seed=0) is not None

    def test_zero_vector(self, orthogonal_design):
        _, lhs, rhs = udp_sides(orthogonal_design.as_float(), np.zeros(2), 1, 1.0, 0.3)
        assert lhs == 0.0 and rhs == 0.0

    def test_trials_checked(self, orthogonal_design):
        with pytest.raises(PreconditionError):
            falsify_udp(orthogonal_design, 1, 1.0, 0.3, trials=0, seed=0)
