"""
Tests for the exact inequality verifiers.
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import UsageError
from src.core.pointset import PointSet
from src.verification.inequalities import (
    hinge_upper_bound,
    mainlm_embedding,
    nu_square_bound_planar,
    nu_square_bound_product,
    power_sum_bound,
    power_sum_check,
    reflection_pair_energy,
    theorem_chain_report,
)
from src.verification.lemmas import planar_trial_size, verify_lemma
from tests.test_data import FixtureData


class TestPowerSums:
    def test_constant_profile_is_tight(self):
        result = power_sum_check([3, 3, 3, 3], 4, 3)
        assert result.lhs == 108
        assert result.rhs == 108
        assert result.passed

    def test_two_point_example(self):
        result = power_sum_check([2, 0], 2, 2)
        assert result.lhs == 4
        assert result.rhs == 4

    def test_coefficient_override(self):
        assert power_sum_bound(2, 2, 4, 2, 2, coefficient=Fraction(0)) == 2

    def test_rejects_bad_input(self):
        with pytest.raises(UsageError):
            power_sum_check([1, 2], 2, 1)
        with pytest.raises(UsageError):
            power_sum_check([1, 2], 3, 2)
        with pytest.raises(UsageError):
            power_sum_check([1, -2], 2, 2)

    @settings(max_examples=200, deadline=None)
    @given(
        values=st.lists(st.integers(0, 30), min_size=1, max_size=40),
        n=st.integers(2, 5),
    )
    def test_random_profiles(self, values, n):
        assert power_sum_check(values, len(values), n).passed


class TestProductSets:
    def test_embedding_on_grid(self):
        result = mainlm_embedding(FixtureData.grid(), 0, 0)
        assert result.n_direct == result.n_graph
        assert result.max_mult_u <= 2
        assert result.max_mult_v <= 2
        assert result.passed

    def test_embedding_needs_a_in_last_set(self):
        pointset = PointSet.from_product(3, [[0, 1, 2], [0, 1]])
        with pytest.raises(UsageError):
            mainlm_embedding(pointset, 2, 0)

    def test_embedding_needs_product(self):
        with pytest.raises(UsageError):
            mainlm_embedding(FixtureData.pair(), 0, 0)

    def test_nu_square_on_grid(self):
        result = nu_square_bound_product(FixtureData.grid())
        assert result.lhs == 2673
        assert result.rhs == 3645
        assert result.passed

    def test_nu_square_thin_coordinate_moves_last(self):
        pointset = PointSet.from_product(3, [[0], [0, 1, 2]])
        result = nu_square_bound_product(pointset)
        assert result.order == [1, 0]
        assert result.min_size == 1
        assert result.lhs == 45
        assert result.rhs == 81
        assert result.passed

    @pytest.mark.parametrize("seed", range(50))
    def test_nu_square_random_products(self, seed):
        pointset = FixtureData.random_products(7, 2, 1, base_seed=seed)[0]
        assert nu_square_bound_product(pointset).passed

    def test_nu_square_needs_product(self):
        with pytest.raises(UsageError):
            nu_square_bound_product(FixtureData.pair())


class TestPlanar:
    @pytest.mark.parametrize("q", [5, 7, 11])
    def test_full_grid(self, q):
        result = nu_square_bound_planar(FixtureData.grid(q, 2), constant=4)
        assert result.passed
        assert result.within_hypothesis
        assert result.quadratic_path_holds
        assert result.incidences.incidences == result.incidences.mixing.edges

    def test_singleton(self):
        result = nu_square_bound_planar(FixtureData.singleton(5), with_incidences=False)
        assert result.lhs == 0
        assert result.rhs == 20
        assert result.passed
        assert not result.within_hypothesis

    def test_wrong_dimension(self):
        with pytest.raises(UsageError):
            nu_square_bound_planar(FixtureData.grid(3, 3))

    def test_hinges_on_grid(self):
        result = hinge_upper_bound(FixtureData.grid())
        assert result.hinge_total == 288
        assert result.passed
        assert result.corollary_applies
        assert result.best_constant == Fraction(288 * 3, 729)

    @pytest.mark.parametrize("seed", range(20))
    def test_hinges_on_random_sets(self, seed):
        pointset = FixtureData.random_sets(7, 2, 14, 1, base_seed=seed)[0]
        result = hinge_upper_bound(pointset)
        assert result.passed
        assert result.corollary_applies
        assert result.corollary_holds

    @pytest.mark.parametrize("seed", range(5))
    def test_hinges_on_planar_sized_sets(self, seed):
        pointset = FixtureData.random_sets(11, 2, planar_trial_size(11), 1, base_seed=seed)[0]
        result = hinge_upper_bound(pointset)
        assert result.passed
        assert result.corollary_holds

    @pytest.mark.parametrize("seed", range(20))
    def test_hinge_lemma_on_random_sets(self, seed):
        report = verify_lemma("remark-4.4", {"random": {"q": 7, "d": 2, "size": 14}, "seed": seed})
        assert report.passed

    def test_reflection_energy(self):
        result = reflection_pair_energy(FixtureData.grid(), 1)
        assert result.pairs == 36
        assert result.bound == 720
        assert result.passed


class TestTheoremChain:
    def test_grid_pairs(self):
        report = theorem_chain_report(FixtureData.grid(), 1)
        assert report.passed
        assert report.details["T"] == 3
        sweep = next(c for c in report.checks if c.name == "pair_sweep_identity")
        assert sweep.lhs == 5832
        assert sweep.rhs == 5994

    def test_grid_triangles(self):
        report = theorem_chain_report(FixtureData.grid(), 2)
        assert report.passed
        identity = next(c for c in report.checks if c.name == "orbit_sum_identity")
        assert identity.lhs == report.details["S2"]

    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("k", [1, 2])
    def test_random_products(self, seed, k):
        pointset = FixtureData.random_products(5, 2, 1, base_seed=seed)[0]
        assert theorem_chain_report(pointset, k).passed

    def test_k_out_of_range(self):
        with pytest.raises(UsageError):
            theorem_chain_report(FixtureData.grid(), 3)
