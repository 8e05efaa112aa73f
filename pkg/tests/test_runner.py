"""
Tests for the suite runner.
"""
import json
from pathlib import Path

import pandas as pd
import pytest

from src.core.errors import ToolkitError, UsageError
from src.suite.runner import (
    EXIT_FINDING,
    EXIT_PASS,
    SuiteRunner,
    expand_cells,
    load_suite_config,
    run_suite,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


def test_empty_suite(tmp_path):
    result = run_suite(CONFIG_DIR / "suite_empty.json", output_dir=str(tmp_path))
    assert result.exit_code == EXIT_PASS
    assert result.summary["cells"] == 0
    assert result.summary["failed"] == []
    assert result.files == {}


def test_negative_suite_flags_both_cells(tmp_path):
    result = run_suite(CONFIG_DIR / "suite_negative.json", output_dir=str(tmp_path))
    assert result.exit_code == EXIT_FINDING
    assert result.summary["failed"] == ["er-q3-m3-corrupted-lambda", "planted-collinear-quadruple"]
    assert set(result.files) == {"json", "csv", "markdown"}

    saved = json.loads((tmp_path / "summary.json").read_text())
    assert saved["suite"] == "negative-controls"
    assert saved["all_pass"] is False

    table = pd.read_csv(tmp_path / "summary.csv")
    assert set(table["cell"]) == {"er-q3-m3-corrupted-lambda", "planted-collinear-quadruple"}
    assert "Failed" in (tmp_path / "summary.md").read_text()


def test_passing_suite(tmp_path):
    config = {
        "name": "small",
        "cells": [
            {"name": "er-3-3", "lemma": "2.2", "params": {"q": 3, "m": 3}},
            {"name": "grid-chain", "lemma": "eq-2-chain", "params": {"grid": {"q": 3, "d": 2}, "k": 1}},
        ],
    }
    result = SuiteRunner(output_dir=str(tmp_path)).run(config, deterministic_names=True)
    assert result.exit_code == EXIT_PASS
    assert result.summary["passed"] == 2


def test_results_do_not_depend_on_threads(tmp_path):
    config = {"cells": [{"lemma": "eq-2-chain", "params": {"grid": {"q": 3, "d": 2}, "k": 2}}]}
    one = SuiteRunner(str(tmp_path / "one"), threads=1).run(config, deterministic_names=True)
    four = SuiteRunner(str(tmp_path / "four"), threads=4).run(config, deterministic_names=True)
    assert (tmp_path / "one" / "summary.json").read_text() == (tmp_path / "four" / "summary.json").read_text()
    assert one.summary["reports"] == four.summary["reports"]


def test_bad_cell_aborts(tmp_path):
    config = {"cells": [{"name": "broken", "lemma": "9.9", "params": {}}]}
    with pytest.raises(ToolkitError, match="broken"):
        SuiteRunner(str(tmp_path)).run(config)


def test_repeat_expansion():
    config = {"seed": 10, "cells": [
        {"name": "rand", "lemma": "1.7", "params": {"random": {"q": 7, "size": 20}}, "repeat": 3},
        {"lemma": "2.2", "params": {"q": 3, "m": 2}},
    ]}
    cells = expand_cells(config)
    assert [c["name"] for c in cells] == ["rand#0", "rand#1", "rand#2", "2.2-1"]
    assert [c["params"]["seed"] for c in cells] == [10, 11, 12, 10]


def test_cell_without_lemma():
    with pytest.raises(UsageError):
        expand_cells({"cells": [{"params": {}}]})


def test_unreadable_config(tmp_path):
    with pytest.raises(UsageError):
        load_suite_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(UsageError):
        load_suite_config(broken)


def test_default_config_loads():
    cells = expand_cells(load_suite_config(CONFIG_DIR / "suite_default.json"))
    assert len(cells) > 20
    assert len({c["name"] for c in cells}) == len(cells)


def test_default_config_trial_counts():
    cells = expand_cells(load_suite_config(CONFIG_DIR / "suite_default.json"))

    def count(prefix):
        return sum(1 for c in cells if c["name"].startswith(prefix + "#"))

    assert count("embedding-random-q5") == 50
    assert count("chain-random-q5-k1") == count("chain-random-q5-k2") == 20
    for q in (5, 7, 11):
        assert count(f"planar-random-q{q}") == 20
    assert count("hinge-bound-random-q7") == 20
    assert count("dds-q7") + count("dds-q11") == 50
