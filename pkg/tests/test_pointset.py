"""
Tests for point-set ingestion and distance statistics.
"""
import numpy as np
import pytest

from src.core.errors import FieldError, PointSetError
from src.core.pointset import (
    PointSet,
    bisector_line,
    distance,
    distance_distribution,
    distance_distribution_direct,
    distance_distribution_product,
    dump_pointset_csv,
    hinge_counts,
    isotropic_report,
    load_pointset,
    norm,
    parse_pointset,
    quadruple_count,
    random_pointset,
    random_product,
    strip_isotropic,
)
from tests.test_data import FixtureData


class TestIngestion:
    def test_csv(self):
        pointset = parse_pointset("# q=3 d=2\n0,1\n2,2\n")
        assert len(pointset) == 2
        assert pointset.points == ((0, 1), (2, 2))

    def test_product_json(self):
        pointset = parse_pointset('{"q": 3, "sets": [[0, 1, 2], [0, 1, 2]]}')
        assert pointset.is_product
        assert len(pointset) == 9

    def test_out_of_range(self):
        with pytest.raises(PointSetError):
            parse_pointset("# q=3 d=2\n0,3\n")

    def test_duplicate_point(self):
        with pytest.raises(PointSetError):
            parse_pointset("# q=3 d=2\n0,1\n0,1\n")

    def test_missing_header(self):
        with pytest.raises(PointSetError):
            parse_pointset("0,1\n")

    def test_non_prime_modulus(self):
        with pytest.raises(PointSetError):
            parse_pointset("# q=9 d=2\n0,1\n")

    @pytest.mark.parametrize("payload", [
        '{"q": 3, "sets": 5}',
        '{"q": 3, "sets": [[0, 1], [0, null]]}',
        '{"q": 3, "sets": [1, 2]}',
        '{"q": 3, "sets": [[0, 1.5]]}',
        '{"q": null, "sets": [[0, 1]]}',
        '{"q": 9, "sets": [[0, 1]]}',
    ])
    def test_malformed_product_json(self, payload):
        with pytest.raises(PointSetError):
            parse_pointset(payload)

    def test_empty_coordinate_set(self):
        with pytest.raises(PointSetError):
            PointSet.from_product(3, [[0, 1], []])

    def test_load_fixture_file(self, tmp_path):
        path = tmp_path / "points.csv"
        path.write_text(dump_pointset_csv(FixtureData.collinear()))
        assert load_pointset(path).points == FixtureData.collinear().points

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(PointSetError):
            load_pointset(tmp_path / "nope.csv")


class TestDistances:
    def test_examples(self):
        assert distance((0, 0), (1, 1), 3) == 2
        assert distance((0, 0), (1, 2), 5) == 0
        assert distance((2, 1), (2, 1), 3) == 0

    def test_norm(self):
        assert norm((1, 2), 5) == 0
        assert norm((1, 1, 1), 3) == 0
        assert norm((2, 3), 7) == 6
        assert distance((3, 4), (1, 1), 7) == norm((2, 3), 7)

    def test_dimension_mismatch(self):
        with pytest.raises(FieldError):
            distance((0, 0), (0, 0, 0), 3)

    def test_grid_distribution(self):
        dist = distance_distribution(FixtureData.grid())
        assert dist.counts == FixtureData.grid_nu()
        assert dist.total() == 81

    def test_singleton_and_pair(self):
        assert distance_distribution(FixtureData.singleton()).counts == {0: 1}
        assert distance_distribution(FixtureData.pair()).counts == {0: 2, 1: 2}

    def test_product_matches_direct(self):
        assert distance_distribution_product([[0, 1], [0, 1, 2]], 3).counts == \
            distance_distribution_direct(PointSet.from_product(3, [[0, 1], [0, 1, 2]])).counts
        assert distance_distribution_product([[0]], 3).counts == {0: 1}

    @pytest.mark.parametrize("seed", range(10))
    def test_random_products_match_direct(self, seed):
        pointset = random_product(7, 2, seed)
        explicit = PointSet.from_points(7, pointset.points)
        assert distance_distribution(pointset).counts == distance_distribution(explicit).counts

    def test_quadruple_counts(self):
        dist = distance_distribution(FixtureData.grid())
        assert quadruple_count(dist) == 2673
        assert quadruple_count(dist, nonzero_only=True) == 2592
        assert quadruple_count(distance_distribution(FixtureData.singleton())) == 1


class TestHinges:
    def test_grid(self):
        hinges = hinge_counts(FixtureData.explicit_grid(), cross_check=True)
        assert hinges[1] == 144
        assert hinges[2] == 144
        assert hinges.total() == 288
        assert hinges.cross_checked

    def test_pair(self):
        hinges = hinge_counts(FixtureData.pair(), cross_check=True)
        assert hinges[1] == 2
        assert hinges[2] == 0

    def test_singleton(self):
        assert hinge_counts(FixtureData.singleton()).total() == 0


class TestBisectors:
    def test_vertical_line(self):
        line = bisector_line((0, 0), (2, 0), 3)
        assert line.points() == [(1, 0), (1, 1), (1, 2)]

    def test_horizontal_line(self):
        line = bisector_line((0, 0), (0, 2), 5)
        assert all(y == 1 for _, y in line.points())
        assert len(line.points()) == 5

    def test_diagonal_line_is_equidistant(self):
        line = bisector_line((0, 0), (1, 1), 3)
        assert line.coefficients == (1, 1, 2)
        for p in line.points():
            assert distance(p, (0, 0), 3) == distance(p, (1, 1), 3)
        others = [(x, y) for x in range(3) for y in range(3) if not line.contains((x, y))]
        assert all(distance(p, (0, 0), 3) != distance(p, (1, 1), 3) for p in others)

    @pytest.mark.parametrize("q", [3, 5])
    def test_every_pair_is_exact(self, q):
        plane = [(x, y) for x in range(q) for y in range(q)]
        for a in plane:
            for b in plane:
                if a == b:
                    continue
                line = bisector_line(a, b, q)
                for p in plane:
                    assert line.contains(p) == (distance(p, a, q) == distance(p, b, q))

    def test_same_point(self):
        with pytest.raises(FieldError):
            bisector_line((1, 1), (1, 1), 3)


class TestIsotropic:
    def test_q_three_mod_four(self):
        report = isotropic_report(FixtureData.grid(7, 2))
        assert report.count == 0
        assert not report.minus_one_is_square

    def test_q_one_mod_four(self):
        report = isotropic_report(FixtureData.grid(5, 2))
        assert report.count > 0
        assert report.to_dict()["minus_one_is_square"]
        assert not report.precondition_holds
        a, b = report.sample[0]
        assert distance(a, b, 5) == 0

    def test_singleton(self):
        assert isotropic_report(FixtureData.singleton(5)).count == 0

    def test_strip(self):
        stripped = strip_isotropic(FixtureData.grid(5, 2))
        assert isotropic_report(stripped).count == 0
        assert 0 < len(stripped) < 25


class TestRandomSets:
    def test_seeded(self):
        a = random_pointset(11, 2, 40, seed=3)
        b = random_pointset(11, 2, 40, seed=3)
        assert a.points == b.points
        assert len(set(a.points)) == 40

    def test_size_range(self):
        with pytest.raises(PointSetError):
            random_pointset(3, 2, 10, seed=0)

    def test_random_product_sizes(self):
        pointset = random_product(5, 3, seed=1, min_size=2)
        assert all(2 <= len(a) <= 5 for a in pointset.sets)
        assert np.array_equal(pointset.array, np.array(pointset.points))
