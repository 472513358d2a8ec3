"""
Operator kernels against the rational oracles, plus the pointwise
inequalities between the operators.
"""

import unittest
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparselab import (AlphaSparseOperator, AlphaSpec, CellFunction, DomainError, MaximalOperator,
                       MaxSparseOperator, MeasSet, OperatorFamily, SetFamily, SparseOperator,
                       UnsupportedOperatorError, apply_alpha_sparse, apply_max_sparse,
                       apply_maximal, apply_sparse, build_random_sparse, build_space, build_tower,
                       dominate_by_martingale, laminar_collection, linearize, overlap_function,
                       verify_level_cover)
from sparselab.experiments import child_seed, lemma_subsets
from sparselab.operators import dominating_sum, level_cover_threshold, COVER_CHAIN_CONSTANT
from sparselab.oracles import (alpha_sparse_oracle, as_exact, max_sparse_oracle, maximal_oracle,
                               overlap_oracle, sparse_oracle)


def dyadic_function(space, seed):
    """Values k/16, so every kernel runs without rounding"""
    rng = np.random.default_rng(seed)
    return CellFunction(space, rng.integers(0, 17, space.cell_count) / 16.0)


def fixture_space(seed):
    return build_space(1, 8) if seed % 2 == 0 else build_space(2, 4)


class TestOracleEquivalence:
    """Fifty seeded fixtures on spaces of 256 cells"""

    @pytest.mark.parametrize("seed", range(50))
    def test_sparse_and_maximal(self, seed):
        space = fixture_space(seed)
        c = build_random_sparse(space, child_seed(seed, 0), 0.5, 10)
        f = dyadic_function(space, child_seed(seed, 1))
        assert as_exact(apply_sparse(c, f)) == sparse_oracle(list(c), f)
        assert as_exact(apply_maximal(c, f)) == maximal_oracle(list(c), f)

    @pytest.mark.parametrize("seed", range(0, 50, 5))
    def test_max_sparse(self, seed):
        space = fixture_space(seed)
        collections = [build_random_sparse(space, child_seed(seed, k), 0.5, 8) for k in range(3)]
        family = OperatorFamily(collections)
        f = dyadic_function(space, child_seed(seed, 9))
        expected = max_sparse_oracle([list(c) for c in collections], f)
        assert as_exact(apply_max_sparse(family, f)) == expected

    @pytest.mark.parametrize("delta", [1.0, 0.5, 0.25])
    def test_alpha_sparse(self, delta):
        space = build_space(1, 8)
        tower = build_tower(space, space.whole(), 6, np.random.default_rng(3))
        subsets = lemma_subsets(tower, delta)
        spec = AlphaSpec(tower, subsets, 1.0, delta)
        f = dyadic_function(space, 4)
        assert as_exact(apply_alpha_sparse(spec, f)) == alpha_sparse_oracle(list(tower), subsets, f)

    def test_overlap(self):
        space = build_space(1, 8)
        c = build_random_sparse(space, 2, 0.5, 12)
        for R0 in [None] + list(c):
            counts = overlap_function(c, R0).values
            assert [int(v) for v in counts] == overlap_oracle(list(c), R0, space.cell_count)


class TestSparseOperator(unittest.TestCase):
    def setUp(self):
        self.space = build_space(1, 4)
        self.tower = build_tower(self.space, self.space.whole(), 4, "left")

    def test_tower_on_constant(self):
        values = apply_sparse(self.tower, CellFunction.constant(self.space, 1.0)).values
        self.assertEqual(list(values), [5, 4, 3, 3, 2, 2, 2, 2] + [1] * 8)

    def test_empty_family_gives_zero(self):
        f = CellFunction.constant(self.space, 1.0)
        self.assertTrue(apply_sparse(SetFamily([], self.space), f).is_zero())
        self.assertTrue(apply_maximal(SetFamily([], self.space), f).is_zero())

    def test_reads_absolute_values(self):
        f = dyadic_function(self.space, 1)
        self.assertEqual(apply_sparse(self.tower, f), apply_sparse(self.tower, f.scaled(-1)))

    def test_homogeneous(self):
        f = dyadic_function(self.space, 2)
        self.assertEqual(apply_sparse(self.tower, f.scaled(4.0)),
                         apply_sparse(self.tower, f).scaled(4.0))

    def test_matrix_matches_kernel(self):
        op = SparseOperator(self.tower)
        f = dyadic_function(self.space, 3)
        np.testing.assert_allclose(op.matrix() @ f.values, op(f).values)

    def test_space_mismatch(self):
        op = SparseOperator(self.tower)
        with self.assertRaises(DomainError):
            op(CellFunction.constant(build_space(1, 3), 1.0))

    def test_nonlinear_operators_have_no_factors(self):
        with self.assertRaises(UnsupportedOperatorError):
            MaximalOperator(self.tower).factors()
        with self.assertRaises(UnsupportedOperatorError):
            MaxSparseOperator(OperatorFamily([self.tower])).matrix()


class TestOverlap:
    def setup_method(self):
        self.space = build_space(1, 4)
        self.tower = build_tower(self.space, self.space.whole(), 4, "left")

    def test_tower_counts(self):
        counts = overlap_function(self.tower).values
        assert list(counts) == [5, 4, 3, 3, 2, 2, 2, 2] + [1] * 8

    def test_restricted_to_a_member(self):
        R0 = self.tower[2]
        counts = overlap_function(self.tower, R0).values
        assert list(counts[:4]) == [3, 2, 1, 1]
        assert not counts[4:].any()

    def test_single_set_gives_indicator(self):
        s = MeasSet.interval(self.space, 4, 8)
        c = SetFamily([s])
        assert overlap_function(c, s) == CellFunction.indicator(s)

    def test_tower_tail_is_geometric(self):
        counts = overlap_function(self.tower, self.tower[0]).values
        for lam in range(5):
            assert np.count_nonzero(counts > lam) / 16 == 2.0 ** -lam

    def test_non_member(self):
        with pytest.raises(DomainError):
            overlap_function(self.tower, MeasSet.interval(self.space, 0, 3))


class TestMaxSparse:
    def setup_method(self):
        self.space = build_space(1, 6)
        self.collections = [build_random_sparse(self.space, k, 0.5, 8) for k in range(4)]
        self.family = OperatorFamily(self.collections)

    def test_requires_collections(self):
        with pytest.raises(DomainError):
            OperatorFamily([])
        other = build_random_sparse(build_space(1, 3), 0, 0.5, 2)
        with pytest.raises(DomainError):
            OperatorFamily([self.collections[0], other])

    def test_union_is_deduplicated(self):
        family = OperatorFamily([self.collections[0], self.collections[0]])
        assert len(family.union) == len(self.collections[0])
        assert family.N == 2

    def test_repeated_collection_does_not_change_value(self):
        f = dyadic_function(self.space, 5)
        single = apply_max_sparse(OperatorFamily([self.collections[0]]), f)
        repeated = apply_max_sparse(OperatorFamily([self.collections[0]] * 8), f)
        assert single == repeated
        assert single == apply_sparse(self.collections[0], f)

    def test_linearization_reconstructs(self):
        f = dyadic_function(self.space, 6)
        part = linearize(self.family, f)
        assert part.reconstruct(f) == apply_max_sparse(self.family, f)
        cells = np.concatenate([p.cells for p in part.parts])
        assert sorted(cells.tolist()) == list(range(self.space.cell_count))

    def test_ties_go_to_lowest_index(self):
        f = dyadic_function(self.space, 7)
        part = linearize(OperatorFamily([self.collections[1]] * 3), f)
        assert not part.choice.any()
        assert part.trace(0, self.space.whole()) == self.space.whole()

    def test_level_cover(self):
        f = dyadic_function(self.space, 8)
        values = apply_max_sparse(self.family, f).values
        for lam in np.unique(values[values > 0]):
            report = verify_level_cover(self.family, f, float(lam), 0.5)
            assert report.passed, f"uncovered cells at level {lam}"

    def test_level_cover_arguments(self):
        f = dyadic_function(self.space, 8)
        with pytest.raises(DomainError):
            verify_level_cover(self.family, f, 0.0, 0.5)
        with pytest.raises(DomainError):
            verify_level_cover(self.family, f, 1.0, 1.0)

    def test_cover_threshold(self):
        # bucket 2 sits at height 2^0, and log_+ 4 = 2
        assert level_cover_threshold(2, 4, 0.5) == pytest.approx(COVER_CHAIN_CONSTANT * 2 / 0.5)


class TestAlphaSpec(unittest.TestCase):
    def setUp(self):
        self.space = build_space(1, 6)
        self.tower = build_tower(self.space, self.space.whole(), 3, "left")

    def test_identity_matches_plain_operator(self):
        f = dyadic_function(self.space, 1)
        spec = AlphaSpec.identity(self.tower)
        self.assertTrue(spec.is_identity)
        self.assertEqual(apply_alpha_sparse(spec, f), apply_sparse(self.tower, f))

    def test_fractional_alpha(self):
        f = dyadic_function(self.space, 2)
        spec = AlphaSpec.identity(self.tower, alpha=0.5)
        avg = self.tower.averages(f)
        expected = np.zeros(self.space.cell_count)
        for a, R in zip(avg, self.tower):
            expected[R.cells] += a ** 0.5
        np.testing.assert_allclose(apply_alpha_sparse(spec, f).values, expected ** 2.0)
        self.assertFalse(AlphaSparseOperator(spec).linear)

    def test_subset_must_lie_inside(self):
        subsets = {R: R for R in self.tower}
        subsets[self.tower[3]] = MeasSet.interval(self.space, 60, 64)
        with self.assertRaises(DomainError):
            AlphaSpec(self.tower, subsets)

    def test_subset_measure_bound(self):
        subsets = {R: R for R in self.tower}
        with self.assertRaises(DomainError):
            AlphaSpec(self.tower, subsets, 1.0, 0.5)

    def test_missing_subset(self):
        with self.assertRaises(DomainError):
            AlphaSpec(self.tower, {self.tower[0]: self.tower[0]})

    def test_images_keep_the_sparsity(self):
        small = MeasSet.interval(self.space, 0, 8)
        base = laminar_collection([self.space.whole(), small])
        self.assertEqual(AlphaSpec(base, {R: R for R in base}).base_gamma, Fraction(8, 9))
        # [0, 16) ⊃ [0, 8) carries Carleson constant 3/2
        with self.assertRaises(DomainError):
            AlphaSpec(base, {self.space.whole(): MeasSet.interval(self.space, 0, 16), small: small})
        spec = AlphaSpec(base, {self.space.whole(): MeasSet.interval(self.space, 32, 48),
                                small: small})
        self.assertEqual(len(spec.image_family()), 2)

    def test_images_must_be_laminar(self):
        subsets = {R: R for R in self.tower}
        subsets[self.tower[0]] = MeasSet.interval(self.space, 4, 40)
        with self.assertRaises(DomainError):
            AlphaSpec(self.tower, subsets)

    def test_tower_gamma_is_used(self):
        spec = AlphaSpec.identity(self.tower)
        self.assertEqual(spec.base_gamma, self.tower.gamma)


class TestDomination:
    def setup_method(self):
        self.space = build_space(1, 6)

    def test_dyadic_family_is_reproduced(self):
        sets = list(build_tower(self.space, self.space.whole(), 4, "right"))
        result = dominate_by_martingale(SetFamily(sets))
        f = dyadic_function(self.space, 3)
        assert dominating_sum(result, f) == apply_sparse(sets, f)

    def test_arbitrary_intervals(self):
        rng = np.random.default_rng(11)
        sets = set()
        while len(sets) < 12:
            a, b = sorted(int(x) for x in rng.choice(65, 2, replace=False))
            sets.add(MeasSet.interval(self.space, a, b))
        sets = list(sets)
        result = dominate_by_martingale(SetFamily(sets))
        f = CellFunction(self.space, rng.random(self.space.cell_count))
        lhs = apply_sparse(sets, f).values
        rhs = float(result.constant) * dominating_sum(result, f).values
        assert np.all(lhs <= rhs * (1 + 1e-12))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 16), st.lists(st.integers(0, 8), min_size=32, max_size=32))
def test_maximal_below_sparse(seed, values):
    space = build_space(1, 5)
    c = build_random_sparse(space, seed, 0.5, 6)
    f = CellFunction(space, values)
    assert np.all(apply_maximal(c, f).values <= apply_sparse(c, f).values)
    assert np.all(apply_sparse(c, f).values >= 0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=32, max_size=32), st.integers(-3, 3))
def test_sparse_operator_homogeneity(values, k):
    space = build_space(1, 5)
    c = build_tower(space, space.whole(), 5, "right")
    f = CellFunction(space, values)
    assert apply_sparse(c, f.scaled(2.0 ** k)) == apply_sparse(c, f).scaled(2.0 ** k)
