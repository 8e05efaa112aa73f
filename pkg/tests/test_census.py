"""
Tests for the distance-matrix census and the orbit census.
"""
from fractions import Fraction

import numpy as np
import pytest

from src.core.errors import CapExceededError, UsageError
from src.core.motions import Motion, enumerate_orthogonal, motion_statistics, stabilizer_size
from src.core.pointset import distance_distribution
from src.verification.census import (
    Census,
    DistanceMatrix,
    cauchy_schwarz_lower_bound,
    congruence_orbits,
    simplex_census,
)
from tests.test_data import FixtureData


def _census_of(counts):
    mu = {DistanceMatrix(1, (t,)): c for t, c in enumerate(counts)}
    return Census(1, 3, 0, mu, exact=False)


class TestDistanceMatrix:
    def test_of_and_matrix(self):
        dm = DistanceMatrix.of([(0, 0), (1, 0), (0, 1)], 3)
        assert dm.entries == (1, 1, 2)
        assert dm.matrix() == [[0, 1, 1], [1, 0, 2], [1, 2, 0]]
        assert dm.key == "1,1,2"

    def test_encode_decode(self):
        dm = DistanceMatrix(2, (2, 0, 1))
        assert DistanceMatrix.decode(dm.encode(3), 2, 3) == dm

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            DistanceMatrix(2, (0, 1))


class TestSimplexCensus:
    def test_pairs_equal_nu(self):
        census = simplex_census(FixtureData.grid(), 1)
        assert {dm.entries[0]: c for dm, c in census.mu.items()} == FixtureData.grid_nu()
        assert census.support_size == 3
        assert census.total == 81

    def test_triangles_mass(self):
        census = simplex_census(FixtureData.grid(), 2)
        assert census.total == 729
        assert census.mass_identity_holds()
        assert census.support_size <= 27

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_singleton(self, k):
        census = simplex_census(FixtureData.singleton(), k)
        assert census.total == 1
        assert list(census.mu) == [DistanceMatrix(k, (0,) * ((k + 1) * k // 2))]

    def test_k_out_of_range(self):
        with pytest.raises(UsageError):
            simplex_census(FixtureData.grid(), 3)

    def test_matches_nu_on_random_sets(self):
        for pointset in FixtureData.random_sets(7, 2, 20, 5):
            census = simplex_census(pointset, 1)
            nu = distance_distribution(pointset).counts
            assert {dm.entries[0]: c for dm, c in census.mu.items()} == nu

    def test_threads_do_not_change_results(self):
        pointset = FixtureData.random_sets(5, 2, 15, 1, base_seed=9)[0]
        assert simplex_census(pointset, 2, threads=1).mu == simplex_census(pointset, 2, threads=3).mu

    def test_cap_and_sampling(self, monkeypatch):
        from src.config.settings import settings as toolkit_settings
        monkeypatch.setattr(toolkit_settings, "CENSUS_TUPLE_CAP", 100)
        with pytest.raises(CapExceededError):
            simplex_census(FixtureData.grid(), 2)
        sampled = simplex_census(FixtureData.grid(), 2, sample=500, seed=1)
        assert not sampled.exact
        assert sampled.total == 500

    def test_csv(self):
        text = simplex_census(FixtureData.grid(), 1).to_csv()
        assert text.splitlines() == ["key,count", '"0",9', '"1",36', '"2",36']


    @pytest.mark.parametrize("k", [1, 2])
    @pytest.mark.parametrize("seed", range(4))
    def test_invariant_under_rigid_motions(self, k, seed):
        pointset = FixtureData.random_sets(5, 2, 12, 1, base_seed=seed)[0]
        group = enumerate_orthogonal(5, 2)
        rng = np.random.default_rng(seed)
        base = simplex_census(pointset, k).mu
        for _ in range(3):
            theta = group[int(rng.integers(len(group)))]
            z = tuple(int(c) for c in rng.integers(0, 5, size=2))
            moved = pointset.mapped(Motion(theta, z).apply)
            assert simplex_census(moved, k).mu == base


class TestCauchySchwarz:
    def test_uniform_equality(self):
        assert cauchy_schwarz_lower_bound(_census_of([2, 2])) == (Fraction(2), 2)

    def test_skewed(self):
        bound, exact = cauchy_schwarz_lower_bound(_census_of([3, 1]))
        assert bound == Fraction(16, 10)
        assert exact == 2

    def test_grid(self):
        bound, exact = cauchy_schwarz_lower_bound(simplex_census(FixtureData.grid(), 1))
        assert bound == Fraction(6561, 2673)
        assert exact == 3


class TestOrbits:
    @pytest.mark.parametrize("k", [1, 2])
    def test_orbit_identity_on_grid(self, k):
        grid = FixtureData.grid()
        orbits = congruence_orbits(grid, k)
        assert orbits.total == 9 ** (k + 1)
        assert orbits.orbit_sum() == motion_statistics(grid, k).s2

    @pytest.mark.parametrize("seed", range(3))
    def test_orbit_identity_on_random_products(self, seed):
        pointset = FixtureData.random_products(5, 2, 1, base_seed=seed)[0]
        assert congruence_orbits(pointset, 2).orbit_sum() == motion_statistics(pointset, 2).s2

    def test_stabilizers_match_sweep(self):
        pointset = FixtureData.explicit_grid()
        orbits = congruence_orbits(pointset, 1)
        for orbit in orbits.orbits.values():
            pts = [pointset.points[i] for i in orbit.representative]
            assert orbit.stabilizer == stabilizer_size(pts, 3)

    @pytest.mark.parametrize("k", [1, 2])
    def test_stabilizer_bound_on_grid(self, k):
        assert congruence_orbits(FixtureData.grid(), k).stabilizer_violations() == []

    def test_k_out_of_range(self):
        with pytest.raises(UsageError):
            congruence_orbits(FixtureData.grid(), 0)
