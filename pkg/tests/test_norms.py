import math
import unittest

import numpy as np
import pytest

from sparselab import (AlphaSparseOperator, AlphaSpec, CellFunction, DomainError, MaximalOperator,
                       MaxSparseOperator, OperatorFamily, SearchConfig, SetFamily, SparseOperator,
                       UnsupportedOperatorError, build_random_sparse, build_space, build_tower,
                       power_method_norm, strong_norm_exact, strong_norm_witness,
                       weak_norm_witness)
from sparselab.norms import (CELLWISE_SEARCH, QUICK_SEARCH, WEAK_WITNESS, _blocks, strong_ratio,
                            weak_ratio)


class TestStrongNormExact(unittest.TestCase):
    def setUp(self):
        self.space = build_space(1, 6)
        self.tower = build_tower(self.space, self.space.whole(), 6, "left")

    def test_single_average_has_norm_one(self):
        estimate = strong_norm_exact(SparseOperator(SetFamily([self.space.whole()])))
        self.assertAlmostEqual(estimate.value, 1.0, places=12)

    def test_disjoint_sets_have_norm_one(self):
        sets = [self.space.cube(2, (k,)) for k in range(4)]
        self.assertAlmostEqual(strong_norm_exact(SparseOperator(SetFamily(sets))).value, 1.0,
                               places=12)

    def test_matches_dense_svd(self):
        op = SparseOperator(self.tower)
        expected = np.linalg.svd(op.matrix(), compute_uv=False)[0]
        self.assertAlmostEqual(strong_norm_exact(op).value, expected, places=10)

    def test_matches_power_method(self):
        op = SparseOperator(build_tower(self.space, self.space.whole(), 5, 4))
        self.assertEqual(strong_norm_exact(op).value,
                         pytest.approx(power_method_norm(op), rel=1e-6))

    def test_witness_attains_value(self):
        op = SparseOperator(self.tower)
        estimate = strong_norm_exact(op)
        self.assertTrue(np.all(estimate.witness.values >= 0))
        self.assertAlmostEqual(estimate.reevaluate(op), estimate.value, places=9)

    def test_alpha_operator_with_identity_subsets(self):
        plain = strong_norm_exact(SparseOperator(self.tower)).value
        alpha = strong_norm_exact(AlphaSparseOperator(AlphaSpec.identity(self.tower))).value
        self.assertAlmostEqual(plain, alpha, places=12)

    def test_empty_family(self):
        estimate = strong_norm_exact(SparseOperator(SetFamily([], self.space)))
        self.assertEqual(estimate.value, 0.0)

    def test_unsupported(self):
        with self.assertRaises(UnsupportedOperatorError):
            strong_norm_exact(MaximalOperator(self.tower))
        with self.assertRaises(UnsupportedOperatorError):
            strong_norm_exact(SparseOperator(self.tower), p=3)
        with self.assertRaises(UnsupportedOperatorError):
            strong_norm_exact(AlphaSparseOperator(AlphaSpec.identity(self.tower, alpha=0.5)))
        big = build_space(1, 13)
        with self.assertRaises(UnsupportedOperatorError):
            strong_norm_exact(SparseOperator(SetFamily([big.whole()])))


class TestWitnesses:
    def setup_method(self):
        self.space = build_space(1, 5)
        self.collections = [build_random_sparse(self.space, k, 0.5, 8) for k in range(3)]
        self.op = MaxSparseOperator(OperatorFamily(self.collections))

    def test_weak_witness_reevaluates(self):
        estimate = weak_norm_witness(self.op, 2, QUICK_SEARCH)
        assert estimate.kind == WEAK_WITNESS
        assert estimate.level is not None
        assert estimate.reevaluate(self.op) == pytest.approx(estimate.value, rel=1e-12)

    def test_strong_witness_reevaluates(self):
        estimate = strong_norm_witness(self.op, 2, SearchConfig(ascent_sweeps=1))
        assert estimate.reevaluate(self.op) == pytest.approx(estimate.value, rel=1e-12)
        assert estimate.value >= 1.0

    def test_weak_below_strong_on_the_same_witness(self):
        weak = weak_norm_witness(self.op, 2, QUICK_SEARCH)
        assert weak.value <= strong_ratio(self.op, weak.witness, 2) * (1 + 1e-12)

    def test_witness_below_exact_norm(self):
        op = SparseOperator(self.collections[0])
        exact = strong_norm_exact(op).value
        assert strong_norm_witness(op, 2).value <= exact * (1 + 1e-9)

    def test_deterministic_for_a_seed(self):
        config = SearchConfig(seed=7, ascent_sweeps=1)
        a = strong_norm_witness(self.op, 1.5, config)
        b = strong_norm_witness(self.op, 1.5, config)
        assert a.value == b.value
        assert a.witness == b.witness
        assert a.candidate == b.candidate

    def test_to_json(self):
        weak = weak_norm_witness(self.op, 2, QUICK_SEARCH)
        assert list(weak.to_json()) == ["kind", "p", "value", "lambda", "seed", "iterations"]
        strong = strong_norm_exact(SparseOperator(self.collections[0]))
        assert list(strong.to_json()) == ["kind", "p", "value", "seed", "iterations"]

    @pytest.mark.parametrize("p", [0.5, math.inf, float("nan")])
    def test_invalid_p(self, p):
        with pytest.raises(DomainError):
            weak_norm_witness(self.op, p, QUICK_SEARCH)


class TestKnownNorms:
    def setup_method(self):
        self.space = build_space(1, 5)

    def test_dyadic_maximal_is_weak_one_one(self):
        cubes = [self.space.cube(level, (k,)) for level in range(6) for k in range(2 ** level)]
        op = MaximalOperator(SetFamily(cubes))
        f = CellFunction.indicator(self.space.cube(5, (0,)))
        value, _ = weak_ratio(op(f), f, 1)
        assert value == pytest.approx(1.0, rel=1e-9)
        estimate = weak_norm_witness(op, 1)
        assert estimate.value == pytest.approx(1.0, rel=1e-9)
        assert estimate.value <= 1.0 + 1e-12

    @pytest.mark.parametrize("p", [1, 1.5, 2, 3])
    def test_single_average_has_witness_one(self, p):
        op = SparseOperator(SetFamily([self.space.whole()]))
        estimate = strong_norm_witness(op, p)
        assert estimate.value == pytest.approx(1.0, rel=1e-12)
        assert estimate.value <= 1.0 + 1e-12


class TestAscent:
    def test_single_cell_blocks(self):
        space = build_space(2, 2)
        blocks = _blocks(space, None)
        assert [b.tolist() for b in blocks] == [[c] for c in range(16)]
        assert len(_blocks(space, 4)) == 4

    def test_cellwise_ascent(self):
        space = build_space(1, 3)
        op = SparseOperator(build_tower(space, space.whole(), 3, 5))
        plain = strong_norm_witness(op, 1.5, SearchConfig(ascent_sweeps=0))
        cellwise = strong_norm_witness(op, 1.5, CELLWISE_SEARCH)
        assert cellwise.value >= plain.value
        assert cellwise.reevaluate(op) == pytest.approx(cellwise.value, rel=1e-12)
        again = strong_norm_witness(op, 1.5, CELLWISE_SEARCH)
        assert again.value == cellwise.value

    def test_cellwise_stays_below_the_exact_norm(self):
        space = build_space(1, 3)
        op = SparseOperator(build_tower(space, space.whole(), 3, "left"))
        assert strong_norm_witness(op, 2, CELLWISE_SEARCH).value <= \
            strong_norm_exact(op).value * (1 + 1e-9)

    def test_settings(self):
        assert SearchConfig(ascent_sweeps=None, ascent_max_blocks=None).ascent_sweeps is None
        with pytest.raises(DomainError):
            SearchConfig(ascent_sweeps=-1)
        with pytest.raises(DomainError):
            SearchConfig(ascent_max_blocks=0)


class TestRatios(unittest.TestCase):
    def test_weak_ratio_of_zero_output(self):
        space = build_space(1, 3)
        op = SparseOperator(SetFamily([space.cube(1, (0,))]))
        f = CellFunction.indicator(space.cube(1, (1,)))
        self.assertEqual(weak_ratio(op(f), f, 2), (0.0, None))

    def test_zero_witness_rejected(self):
        space = build_space(1, 3)
        op = SparseOperator(SetFamily([space.whole()]))
        with self.assertRaises(DomainError):
            strong_ratio(op, CellFunction.zeros(space), 2)

    def test_tower_on_indicator(self):
        # Λ 1_Q on a left tower of height 3 is 4 on the first eighth of [0, 1)
        space = build_space(1, 3)
        op = SparseOperator(build_tower(space, space.whole(), 3, "left"))
        f = CellFunction.constant(space, 1.0)
        value, lam = weak_ratio(op(f), f, 1)
        self.assertLess(lam, 4.0)
        self.assertGreaterEqual(value, 4.0 * 0.125 * (1 - 1e-12))
