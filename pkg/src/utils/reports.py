"""
Check records and report collection for lemma verification runs.
"""
import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.utils.exact import as_ratio

logger = logging.getLogger(__name__)

FLOAT_TOL = 1e-6


@dataclass
class CheckRecord:
    """One inequality or identity, with both sides kept exact."""
    name: str
    lhs: Any
    rhs: Any
    relation: str  # "<=", "<", "==" or ">="
    passed: bool
    gating: bool = True
    note: Optional[str] = None

    @property
    def ratio(self) -> Optional[Fraction]:
        if isinstance(self.lhs, float) or isinstance(self.rhs, float):
            return None
        try:
            return as_ratio(self.lhs, self.rhs)
        except (TypeError, ValueError):
            return None


def check(name: str, lhs: Any, rhs: Any, relation: str = "<=",
          gating: bool = True, note: Optional[str] = None,
          passed: Optional[bool] = None) -> CheckRecord:
    """Build a record, deciding ``passed`` from the relation unless given."""
    if passed is None:
        if relation == "<=":
            passed = lhs <= rhs
        elif relation == "<":
            passed = lhs < rhs
        elif relation == "==":
            passed = lhs == rhs
        elif relation == ">=":
            passed = lhs >= rhs
        else:
            raise ValueError(f"unknown relation {relation!r}")
    return CheckRecord(name, lhs, rhs, relation, bool(passed), gating, note)


@dataclass
class LemmaReport:
    """Result of one verification cell."""
    lemma: str
    params: Dict[str, Any]
    checks: List[CheckRecord] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lemma": self.lemma,
            "params": self.params,
            "pass": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "relation": c.relation,
                    "pass": c.passed,
                    "gating": c.gating,
                    "note": c.note,
                }
                for c in self.checks
            ],
            "details": self.details,
        }


def to_jsonable(value: Any) -> Any:
    """Exact JSON form: rationals as strings, floats annotated with a tolerance."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (float, np.floating)):
        return {"value": round(float(value), 12), "kind": "float", "tol": FLOAT_TOL}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    raise TypeError(f"cannot serialise {type(value).__name__}")


def dumps(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2)


def _cell_value(value: Any) -> Any:
    jsonable = to_jsonable(value)
    if isinstance(jsonable, dict) and jsonable.get("kind") == "float":
        return jsonable["value"]
    return jsonable


class ReportCollector:
    """Collects lemma reports and persists them as JSON, CSV and markdown."""

    def __init__(self, save_path: str = "./results/"):
        self.save_path = save_path
        self.reports: List[LemmaReport] = []

    def add_report(self, cell: str, report: LemmaReport) -> None:
        report.details.setdefault("cell", cell)
        self.reports.append(report)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def failed_cells(self) -> List[str]:
        return [r.details["cell"] for r in self.reports if not r.passed]

    def summary(self) -> Dict[str, Any]:
        return {
            "cells": len(self.reports),
            "passed": sum(r.passed for r in self.reports),
            "failed": self.failed_cells(),
            "all_pass": self.all_passed,
            "reports": [r.to_dict() for r in self.reports],
        }

    def to_dataframe(self) -> pd.DataFrame:
        rows = []
        for report in self.reports:
            for c in report.checks:
                ratio = c.ratio
                rows.append({
                    "cell": report.details["cell"],
                    "check": c.name,
                    "lhs": _cell_value(c.lhs),
                    "rhs": _cell_value(c.rhs),
                    "ratio": to_jsonable(ratio) if ratio is not None else "",
                    "pass": c.passed,
                    "gating": c.gating,
                })
        return pd.DataFrame(rows, columns=["cell", "check", "lhs", "rhs", "ratio", "pass", "gating"])

    def _path(self, filename: Optional[str], suffix: str) -> str:
        if filename is None:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            filename = f"summary_{timestamp}.{suffix}"
        os.makedirs(self.save_path, exist_ok=True)
        return os.path.join(self.save_path, filename)

    def save_json(self, filename: Optional[str] = None, payload: Optional[Dict[str, Any]] = None) -> str:
        """Save the summary (or a caller-extended copy of it) to a JSON file."""
        filepath = self._path(filename, "json")
        with open(filepath, "w") as f:
            f.write(dumps(payload if payload is not None else self.summary()))
            f.write("\n")
        logger.info("summary JSON written to %s", filepath)
        return filepath

    def export_to_csv(self, filename: Optional[str] = None) -> str:
        """Export the flattened check table to CSV."""
        filepath = self._path(filename, "csv")
        self.to_dataframe().to_csv(filepath, index=False)
        logger.info("check table written to %s", filepath)
        return filepath

    def generate_summary_report(self) -> str:
        """Generate a human-readable summary report."""
        lines = [
            "# Verification Summary",
            "",
            f"- **Cells**: {len(self.reports)}",
            f"- **Passed**: {sum(r.passed for r in self.reports)}",
            f"- **Failed**: {', '.join(self.failed_cells()) or 'none'}",
            "",
            "| cell | check | pass | gating |",
            "|------|-------|------|--------|",
        ]
        for report in self.reports:
            for c in report.checks:
                lines.append(f"| {report.details['cell']} | {c.name} | {c.passed} | {c.gating} |")
        return "\n".join(lines) + "\n"
