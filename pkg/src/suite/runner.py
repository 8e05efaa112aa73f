"""
Suite runner for lemma verification matrices.
This module executes every (lemma, parameters) cell of a suite config and
persists one summary JSON plus a flat CSV table.
"""
import copy
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src import __version__
from src.config.settings import settings
from src.core.errors import ToolkitError, UsageError
from src.utils.reports import ReportCollector
from src.verification.lemmas import verify_lemma

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FINDING, EXIT_ERROR = 0, 1, 2


def _banner(text: str = "") -> None:
    if text:
        print(text, file=sys.stderr)
    print("=" * 60, file=sys.stderr)


def load_suite_config(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        config = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read suite config {path}: {e}") from e
    if not isinstance(config.get("cells", []), list):
        raise UsageError("suite config 'cells' must be a list")
    return config


def expand_cells(config: Dict[str, Any]) -> List[Dict[str, Any]]:
    """
    Flatten ``repeat`` cells into one cell per seed.

    A cell {"name": n, "lemma": id, "params": {...}, "repeat": r} becomes r
    cells named n#0..n#(r-1) whose params carry seed = base + i.
    """
    base_seed = int(config.get("seed", settings.SEED))
    cells = []
    for i, cell in enumerate(config.get("cells", [])):
        if "lemma" not in cell:
            raise UsageError(f"cell {i} has no lemma id")
        name = cell.get("name", f"{cell['lemma']}-{i}")
        params = dict(cell.get("params", {}))
        repeat = int(cell.get("repeat", 1))
        if repeat <= 1:
            params.setdefault("seed", base_seed)
            cells.append({"name": name, "lemma": cell["lemma"], "params": params})
            continue
        start = int(params.get("seed", base_seed))
        for r in range(repeat):
            expanded = copy.deepcopy(params)
            expanded["seed"] = start + r
            cells.append({"name": f"{name}#{r}", "lemma": cell["lemma"], "params": expanded})
    return cells


@dataclass
class SuiteResult:
    summary: Dict[str, Any]
    exit_code: int
    files: Dict[str, str]


class SuiteRunner:
    """
    Runs a verification suite cell by cell.

    Every cell runs one registry lemma; reports land in a ReportCollector,
    which writes the JSON summary and the check table.
    """

    def __init__(self, output_dir: Optional[str] = None, threads: Optional[int] = None):
        self.output_dir = output_dir or settings.RESULTS_PATH
        self.threads = threads
        self.collector = ReportCollector(self.output_dir)

    def run(self, config: Dict[str, Any], save_results: bool = True, deterministic_names: bool = False) -> SuiteResult:
        """
        Run every cell of a suite config.

        Args:
            config: Parsed suite config with ``cells`` and optional ``seed``
            save_results: Whether to write JSON, CSV and markdown files
            deterministic_names: Use fixed file names instead of timestamped ones

        Returns:
            SuiteResult with the summary payload and the exit code
        """
        cells = expand_cells(config)
        previous_threads = settings.THREADS
        if self.threads is not None:
            settings.THREADS = self.threads
        try:
            return self._run_cells(config, cells, save_results, deterministic_names)
        finally:
            settings.THREADS = previous_threads

    def _run_cells(self, config: Dict[str, Any], cells: List[Dict[str, Any]], save_results: bool,
                   deterministic_names: bool) -> SuiteResult:
        _banner(f"SUITE {config.get('name', 'unnamed')}: {len(cells)} cell(s)")

        for cell in cells:
            params = dict(cell["params"])
            started = time.time()
            try:
                report = verify_lemma(cell["lemma"], params)
            except (ToolkitError, ValueError) as e:
                _banner(f"ABORT in cell {cell['name']} ({cell['lemma']}): {e}")
                raise ToolkitError(f"cell {cell['name']} ({cell['lemma']}): {e}") from e
            self.collector.add_report(cell["name"], report)
            status = "pass" if report.passed else "FAIL"
            print(f"  {cell['name']:<32} {cell['lemma']:<16} {status} ({time.time() - started:.2f}s)",
                  file=sys.stderr)

        summary = self.collector.summary()
        summary["suite"] = config.get("name", "unnamed")
        summary["version"] = __version__
        exit_code = EXIT_PASS if self.collector.all_passed else EXIT_FINDING

        files: Dict[str, str] = {}
        if save_results and cells:
            files = self._save(summary, deterministic_names)
        self._print_summary(summary)
        return SuiteResult(summary, exit_code, files)

    def _save(self, summary: Dict[str, Any], deterministic_names: bool) -> Dict[str, str]:
        json_name = "summary.json" if deterministic_names else None
        csv_name = "summary.csv" if deterministic_names else None
        md_name = "summary.md" if deterministic_names else f"summary_{time.strftime('%Y%m%d_%H%M%S')}.md"

        files = {
            "json": self.collector.save_json(json_name, payload=summary),
            "csv": self.collector.export_to_csv(csv_name),
        }
        md_path = Path(self.output_dir) / md_name
        md_path.write_text(self.collector.generate_summary_report(), encoding="utf-8")
        files["markdown"] = str(md_path)

        print("\nResults saved:", file=sys.stderr)
        for kind, path in files.items():
            print(f"  {kind}: {path}", file=sys.stderr)
        return files

    def _print_summary(self, summary: Dict[str, Any]) -> None:
        _banner("\nSUITE SUMMARY")
        print(f"Cells:  {summary['cells']}", file=sys.stderr)
        print(f"Passed: {summary['passed']}", file=sys.stderr)
        failed = summary["failed"]
        print(f"Failed: {', '.join(failed) if failed else 'none'}", file=sys.stderr)
        _banner()


def run_suite(
    config_path: Union[str, Path],
    output_dir: Optional[str] = None,
    threads: Optional[int] = None,
    save_results: bool = True,
) -> SuiteResult:
    """Load a suite config, run it, and return the summary with its exit code."""
    config = load_suite_config(config_path)
    runner = SuiteRunner(output_dir=output_dir, threads=threads)
    return runner.run(config, save_results=save_results, deterministic_names=output_dir is not None)
