"""
Tests for exact comparisons, check records, JSON output and the chunked map-reduce.
"""
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.utils.exact import as_ratio, ceil_fraction, floor_plus_sqrt, floor_root, le_plus_sqrt, lt_plus_sqrt
from src.utils.parallel import chunked_map_reduce, merge_counts, split_chunks
from src.utils.reports import LemmaReport, ReportCollector, check, dumps, to_jsonable


class TestExact:
    def test_le_plus_sqrt(self):
        # 3 <= 1 + sqrt(4) holds with equality
        assert le_plus_sqrt(3, 1, 1, 4)
        assert not lt_plus_sqrt(3, 1, 1, 4)
        assert not le_plus_sqrt(Fraction(301, 100), 1, 1, 4)
        assert le_plus_sqrt(-5, 0, 0, 0)

    def test_floor_plus_sqrt(self):
        assert floor_plus_sqrt(1, 1, 4) == 3
        assert floor_plus_sqrt(Fraction(1, 2), 1, 2) == 1
        assert floor_plus_sqrt(0, 2, 5) == 4
        assert floor_plus_sqrt(Fraction(4, 5), 20, 1) == 20

    def test_negative_arguments(self):
        with pytest.raises(ValueError):
            le_plus_sqrt(1, 0, -1, 4)

    @given(st.integers(0, 10**9), st.integers(1, 1000), st.integers(1, 5))
    def test_floor_root(self, num, den, r):
        s = floor_root(num, den, r)
        assert s**r * den <= num < (s + 1) ** r * den

    def test_ceil_fraction(self):
        assert ceil_fraction(Fraction(15, 4)) == 4
        assert ceil_fraction(Fraction(-15, 4)) == -3
        assert ceil_fraction(6) == 6

    def test_as_ratio(self):
        assert as_ratio(5832, 5994) == Fraction(36, 37)
        assert as_ratio(0, 0) == 0


class TestChecks:
    @pytest.mark.parametrize("relation,lhs,rhs,expected", [
        ("<=", 3, 3, True), ("<", 3, 3, False), ("==", Fraction(1, 2), Fraction(2, 4), True), (">=", 2, 3, False),
    ])
    def test_relations(self, relation, lhs, rhs, expected):
        assert check("c", lhs, rhs, relation).passed is expected

    def test_unknown_relation(self):
        with pytest.raises(ValueError):
            check("c", 1, 2, "!=")

    def test_non_gating_failure_passes_report(self):
        report = LemmaReport("x", {})
        report.add(check("gate", 1, 2))
        report.add(check("printed", 3, 2, gating=False))
        assert report.passed
        report.add(check("broken", 3, 2))
        assert not report.passed

    def test_ratio(self):
        assert check("c", 5832, 5994).ratio == Fraction(36, 37)
        assert check("c", 1.5, 2).ratio is None


class TestJson:
    def test_fractions_and_floats(self):
        assert to_jsonable(Fraction(6561, 2673)) == "6561/2673"
        assert to_jsonable(Fraction(4)) == "4"
        assert to_jsonable(1.5) == {"value": 1.5, "kind": "float", "tol": 1e-6}
        assert to_jsonable(np.int64(7)) == 7
        assert to_jsonable({1: (True, None)}) == {"1": [True, None]}

    def test_unserialisable(self):
        with pytest.raises(TypeError):
            to_jsonable(object())

    def test_dumps_is_sorted(self):
        text = dumps({"b": 1, "a": Fraction(1, 3)})
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": "1/3", "b": 1}


class TestCollector:
    def test_summary_and_files(self, tmp_path):
        collector = ReportCollector(str(tmp_path))
        good = LemmaReport("2.2", {"q": 3})
        good.add(check("ok", 1, 1, "=="))
        bad = LemmaReport("2.2", {"q": 5})
        bad.add(check("ratio", Fraction(7, 2), 3))
        collector.add_report("good", good)
        collector.add_report("bad", bad)

        summary = collector.summary()
        assert summary["cells"] == 2
        assert summary["failed"] == ["bad"]
        frame = collector.to_dataframe()
        assert list(frame["ratio"]) == ["1", "7/6"]

        path = collector.save_json("s.json")
        assert json.loads(open(path).read())["passed"] == 1
        assert collector.export_to_csv("s.csv").endswith("s.csv")
        assert "| bad | ratio | False | True |" in collector.generate_summary_report()


class TestParallel:
    def test_split_chunks(self):
        assert split_chunks(range(7), 3) == [[0, 1, 2], [3, 4], [5, 6]]
        assert split_chunks([], 4) == []
        assert split_chunks([1, 2], 8) == [[1], [2]]

    @pytest.mark.parametrize("threads", [1, 2, 5])
    def test_merge_order(self, threads):
        out = chunked_map_reduce(list(range(20)), lambda chunk: list(chunk), lambda a, b: a + b, [], threads)
        assert out == list(range(20))

    def test_counts_independent_of_threads(self):
        def residues(chunk):
            return {k: sum(1 for x in chunk if x % 3 == k) for k in range(3)}

        items = list(range(30))
        one = chunked_map_reduce(items, residues, merge_counts, {}, 1)
        four = chunked_map_reduce(items, residues, merge_counts, {}, 4)
        assert one == four == {0: 10, 1: 10, 2: 10}
