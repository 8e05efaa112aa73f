#!/usr/bin/env python3
"""
Run the default desk-scale verification suite.

Usage: python run_suite.py [config.json] [output_dir]
"""

import os
import sys

# Ensure the project root is in the Python path for module discovery.
project_root = os.path.abspath(os.path.dirname(__file__))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.cli.main import configure_logging  # noqa: E402
from src.core.errors import ToolkitError  # noqa: E402
from src.suite.runner import EXIT_ERROR, run_suite  # noqa: E402


def main() -> int:
    config_path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(project_root, "config", "suite_default.json")
    output_dir = sys.argv[2] if len(sys.argv) > 2 else None
    configure_logging()
    try:
        result = run_suite(config_path, output_dir=output_dir)
    except ToolkitError as e:
        print(f"\nSuite aborted: {e}", file=sys.stderr)
        return EXIT_ERROR
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
