"""
Tests for singular quadruples, the Spencer floor and distinct-distance extraction.
"""
from fractions import Fraction

import numpy as np
import pytest

from src.core.errors import CapExceededError, RoundLimitError, UsageError
from src.core.pointset import PointSet, distance
from src.dds.extractor import (
    Hypergraph4,
    dds_extract,
    independent_set,
    pigeonhole_thresholds,
    singular_quadruples,
    singular_quadruples_naive,
    spencer_floor,
    verify_distinct_distance,
)
from tests.test_data import FixtureData


class TestSingularQuadruples:
    def test_collinear_points_form_an_edge(self):
        singular = singular_quadruples(FixtureData.collinear())
        assert singular.hypergraph.edge_set() == {(0, 1, 2, 3)}

    def test_three_points_have_no_edges(self):
        singular = singular_quadruples(FixtureData.collinear(count=3))
        assert singular.hypergraph.m == 0

    def test_distinct_quadruple_has_no_edges(self):
        assert singular_quadruples(FixtureData.distinct_quadruple()).hypergraph.m == 0

    @pytest.mark.parametrize("q,size,seed", [(11, 40, s) for s in range(6)] + [(7, 30, s) for s in range(4)])
    def test_pruned_matches_naive(self, q, size, seed):
        pointset = FixtureData.random_sets(q, 2, size, 1, base_seed=seed)[0]
        pruned = singular_quadruples(pointset).hypergraph
        naive = singular_quadruples_naive(pointset)
        assert pruned.edge_set() == naive.edge_set()

    def test_pruned_matches_naive_with_isotropic_pairs(self):
        pointset = FixtureData.random_sets(13, 2, 30, 1, base_seed=5)[0]
        assert singular_quadruples(pointset).hypergraph.edge_set() == \
            singular_quadruples_naive(pointset).edge_set()

    def test_threads_do_not_change_edges(self):
        pointset = FixtureData.random_sets(11, 2, 30, 1, base_seed=2)[0]
        one = singular_quadruples(pointset, threads=1).hypergraph
        four = singular_quadruples(pointset, threads=4).hypergraph
        assert np.array_equal(one.edges, four.edges)

    def test_point_cap(self, monkeypatch):
        from src.config.settings import settings as toolkit_settings
        monkeypatch.setattr(toolkit_settings, "DDS_POINT_CAP", 10)
        with pytest.raises(CapExceededError):
            singular_quadruples(FixtureData.grid(5, 2))


class TestHypergraph:
    def test_rejects_repeated_vertex(self):
        with pytest.raises(ValueError):
            Hypergraph4(5, [[0, 1, 1, 2]])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Hypergraph4(4, [[0, 1, 2, 4]])

    def test_edges_are_sorted_and_unique(self):
        graph = Hypergraph4(6, [[3, 2, 1, 0], [0, 1, 2, 3], [5, 4, 3, 2]])
        assert graph.m == 2
        assert graph.edge_set() == {(0, 1, 2, 3), (2, 3, 4, 5)}

    def test_independence(self):
        graph = Hypergraph4(6, [[0, 1, 2, 3]])
        assert graph.is_independent([0, 1, 2, 4, 5])
        assert not graph.is_independent([0, 1, 2, 3])


class TestSpencer:
    @pytest.mark.parametrize("n,m,target", [(8, 2, 6), (16, 4, 12)])
    def test_examples(self, n, m, target):
        bound = spencer_floor(n, 4, m)
        assert bound.hypothesis_holds
        assert bound.target == target

    def test_value_is_exact(self):
        assert spencer_floor(8, 4, 2).value == Fraction(6)

    def test_too_few_edges(self):
        bound = spencer_floor(10, 4, 2)
        assert not bound.hypothesis_holds
        assert bound.target == 0

    def test_no_edges(self):
        bound = spencer_floor(7, 4, 0)
        assert bound.whole_set
        assert bound.target == 7

    def test_bad_arguments(self):
        with pytest.raises(UsageError):
            spencer_floor(8, 1, 2)
        with pytest.raises(UsageError):
            spencer_floor(-1, 4, 2)


class TestIndependentSet:
    def test_no_edges(self):
        assert independent_set(Hypergraph4(5, np.empty((0, 4))), seed=0) == [0, 1, 2, 3, 4]

    def test_single_edge(self):
        graph = Hypergraph4(8, [[0, 1, 2, 3]])
        chosen = independent_set(graph, seed=0)
        assert chosen == [0, 1, 2, 4, 5, 6, 7]

    def test_random_hypergraph(self):
        rng = np.random.default_rng(0)
        edges = np.array([rng.choice(60, 4, replace=False) for _ in range(200)])
        graph = Hypergraph4(60, edges)
        chosen = independent_set(graph, seed=1)
        assert graph.is_independent(chosen)
        assert len(chosen) >= spencer_floor(60, 4, graph.m).target

    def test_seeded(self):
        rng = np.random.default_rng(3)
        graph = Hypergraph4(40, np.array([rng.choice(40, 4, replace=False) for _ in range(150)]))
        assert independent_set(graph, seed=7) == independent_set(graph, seed=7)

    def test_round_limit(self):
        graph = Hypergraph4(8, [[0, 1, 2, 3]])
        with pytest.raises(RoundLimitError):
            independent_set(graph, seed=0, rounds=0)
        with pytest.raises(RoundLimitError) as info:
            independent_set(graph, seed=0, target=9, rounds=3)
        assert info.value.target == 9
        assert len(info.value.best) == 7


class TestVerification:
    def test_small_sets(self):
        assert verify_distinct_distance([], 7).ok
        assert verify_distinct_distance([(0, 0), (1, 0), (2, 0)], 7).ok

    def test_collinear(self):
        cert = verify_distinct_distance(FixtureData.collinear().points, 7)
        assert not cert.ok
        a, b, c, d = cert.witness
        assert len({a, b, c, d}) == 4
        assert distance(a, b, 7) == distance(c, d, 7)

    def test_hinge_alone_is_allowed(self):
        # (1,0) and (0,1) sit at the same distance from the origin
        assert verify_distinct_distance([(0, 0), (1, 0), (0, 1)], 7).ok

    def test_planted_repeat(self):
        assert not verify_distinct_distance(FixtureData.planted_repeat(), 7).ok

    def test_pigeonhole(self):
        assert pigeonhole_thresholds(7) == {"exact": 5, "sqrt_2q_plus_1": 5}
        assert pigeonhole_thresholds(11)["exact"] == 6


class TestExtraction:
    def test_random_set(self):
        pointset = FixtureData.random_sets(11, 2, 100, 1)[0]
        result = dds_extract(pointset, seed=0)
        assert result.verified
        assert result.meets_floor

    @pytest.mark.parametrize("q,size,seed", [(7, 40, s) for s in range(25)] + [(11, 60, s) for s in range(25)])
    def test_seeded_runs_meet_floor(self, q, size, seed):
        pointset = FixtureData.random_sets(q, 2, size, 1, base_seed=100 + seed)[0]
        result = dds_extract(pointset, seed=seed)
        assert result.verified
        assert len(result.subset) >= result.spencer.target

    def test_distinct_quadruple_keeps_everything(self):
        pointset = FixtureData.distinct_quadruple()
        result = dds_extract(pointset, seed=0)
        assert result.subset == list(pointset.points)
        assert result.edges == 0

    def test_collinear_drops_one_point(self):
        result = dds_extract(FixtureData.collinear(), seed=0)
        assert len(result.subset) == 3
        assert result.subset == [(0, 0), (1, 0), (2, 0)]
        assert result.verified

    def test_same_seed_same_subset(self):
        pointset = FixtureData.random_sets(7, 2, 30, 1, base_seed=4)[0]
        assert dds_extract(pointset, seed=3).subset == dds_extract(pointset, seed=3).subset

    def test_planar_only(self):
        with pytest.raises(UsageError):
            dds_extract(FixtureData.grid(3, 3))

    def test_report_fields(self):
        out = dds_extract(PointSet.from_points(7, [(0, 0), (1, 0)]), seed=0).to_dict()
        assert out["verified"]
        assert out["spencer_floor"] == 2
        assert out["edge_constant"] == 0
