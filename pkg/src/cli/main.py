"""
Command line for the finite-field simplex census toolkit.

Every subcommand writes one JSON document (to stdout or ``--out``) that embeds
the resolved ExperimentConfig and the toolkit version. Logs go to stderr.

Exit codes: 0 all checks passed, 1 a verified inequality failed,
2 usage, input or cap error.
"""
import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src import __version__
from src.config.settings import settings
from src.core.errors import ToolkitError, UsageError
from src.core.motions import enumerate_orthogonal, orthogonal_order
from src.core.pointset import (
    distance_distribution,
    hinge_counts,
    isotropic_report,
    quadruple_count,
    strip_isotropic,
)
from src.dds.extractor import dds_extract
from src.graphs.specgraph import second_eigenvalue, spectrum_summary
from src.suite.runner import EXIT_ERROR, EXIT_FINDING, EXIT_PASS, run_suite
from src.utils.reports import dumps
from src.verification.census import simplex_census
from src.verification.lemmas import lemma_ids, resolve_graph, resolve_pointset, verify_lemma
from src.verification.thresholds import threshold_report

logger = logging.getLogger(__name__)

DEFAULT_SUITE = "config/suite_default.json"


@dataclass
class ExperimentConfig:
    """Resolved parameters of one run; embedded in its output."""
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    input: Optional[str] = None
    output: Optional[str] = None
    threads: int = 1

    def to_dict(self) -> Dict[str, Any]:
        # threads and log level are left out: results do not depend on them
        resolved = {k: v for k, v in settings.as_dict().items() if k not in ("threads", "log_level")}
        return {
            "command": self.command,
            "params": {k: v for k, v in self.params.items() if v is not None},
            "input": self.input,
            "output": self.output,
            "settings": resolved,
        }


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so run() owns exit codes."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _add_pointset_flags(p: argparse.ArgumentParser, d_default: Optional[int] = None) -> None:
    p.add_argument("--input", help="point-set file (CSV with '# q= d=' header, or product JSON)")
    p.add_argument("--q", type=int, help="field size (grid when no --input)")
    p.add_argument("--d", type=int, default=d_default, help="dimension of the grid or random set")
    p.add_argument("--random", dest="random_size",
                   help="random subset of F_q^d of this size (or 'planar' for ceil(4q^{4/3}))")
    p.add_argument("--random-product", action="store_true", help="random product set in F_q^d")
    p.add_argument("--seed", type=int, default=None, help="seed for random inputs")


def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", choices=["er", "reflection"], default="er")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, help="projective dimension + 1 (ER graph)")
    p.add_argument("--lam", type=int, help="radius lambda (reflection graph)")
    p.add_argument("--declared-lambda", help="override the declared second eigenvalue")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ffsimplex", description="Exact verification of finite-field simplex census bounds")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (results do not depend on it)")
    parser.add_argument("--out", help="write JSON here instead of stdout (a directory for 'suite')")
    parser.add_argument("--log-level", default=None, help="overrides FFS_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("nu", help="distance distribution, quadruple counts, hinges")
    _add_pointset_flags(p)

    p = sub.add_parser("census", help="congruence-class census by distance matrix")
    _add_pointset_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--top", type=int, default=10, help="number of top classes in the JSON")
    p.add_argument("--csv", help="write the full (key, count) table here")
    p.add_argument("--sample", type=int, help="sample this many tuples when over the census cap")

    p = sub.add_parser("spectrum", help="declared vs measured graph parameters")
    _add_graph_flags(p)
    p.add_argument("--edges", help="write the edge list here")

    p = sub.add_parser("mixing", help="randomised mixing trials on a verified graph")
    _add_graph_flags(p)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("group", help="orthogonal group orders")
    p.add_argument("--q", type=int, nargs="+", required=True)
    p.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--matrices", action="store_true", help="include the enumerated matrices")

    p = sub.add_parser("verify-lemma", help="run one registry lemma")
    p.add_argument("lemma", help=f"one of: {', '.join(lemma_ids())}")
    _add_pointset_flags(p)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--lam", type=int)
    p.add_argument("--graph", choices=["er", "reflection"])
    p.add_argument("--trials", type=int)
    p.add_argument("--constant", type=int, help="implicit constant C of the planar bounds")
    p.add_argument("--declared-lambda", help="override the declared second eigenvalue")

    p = sub.add_parser("chain", help="census inequality chain on a point set")
    _add_pointset_flags(p)
    p.add_argument("--k", type=int, default=1)

    p = sub.add_parser("dds", help="distinct-distance subset extraction (planar)")
    _add_pointset_flags(p, d_default=2)

    p = sub.add_parser("thresholds", help="which size hypotheses hold")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--size", type=int)
    p.add_argument("--sizes", type=int, nargs="+", help="|A_1| .. |A_d| of a product set")
    p.add_argument("--epsilon", default="0", help="epsilon of the two-set triangle result (rational)")
    p.add_argument("--input", help="take sizes from a point set and measure its census")

    p = sub.add_parser("suite", help="run a suite config")
    p.add_argument("config", nargs="?", default=DEFAULT_SUITE)
    return parser


def _pointset_params(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {"input": args.input, "q": args.q, "d": args.d, "seed": args.seed}
    if args.input is None and args.q is not None:
        d = args.d if args.d is not None else 2
        params["d"] = d
        if args.random_size is not None:
            size = args.random_size if args.random_size == "planar" else int(args.random_size)
            params["random"] = {"q": args.q, "d": d, "size": size}
        elif args.random_product:
            params["random_product"] = {"q": args.q, "d": d}
    return {k: v for k, v in params.items() if v is not None}


def _graph_params(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "graph": args.graph, "q": args.q, "m": args.m, "lam": args.lam,
        "declared_lambda": args.declared_lambda,
    }


# ---------------------------------------------------------------------------
# Subcommands: each returns (params, result, passed)
# ---------------------------------------------------------------------------

def _cmd_nu(args: argparse.Namespace):
    params = _pointset_params(args)
    pointset = resolve_pointset(params)
    dist = distance_distribution(pointset)
    iso = isotropic_report(pointset)
    result = {
        "pointset": pointset.describe(),
        "nu": dist.to_dict(),
        "W": quadruple_count(dist),
        "W_nonzero": quadruple_count(dist, nonzero_only=True),
        "hinges": hinge_counts(pointset).to_dict() if pointset.d == 2 else None,
        "isotropic": iso.to_dict(),
        "stripped_size": len(pointset) if iso.precondition_holds else len(strip_isotropic(pointset)),
    }
    return params, result, True


def _cmd_census(args: argparse.Namespace):
    params = dict(_pointset_params(args), k=args.k, sample=args.sample)
    pointset = resolve_pointset(params)
    census = simplex_census(pointset, args.k, sample=args.sample, seed=params.get("seed"))
    if args.csv:
        Path(args.csv).write_text(census.to_csv(), encoding="utf-8")
        logger.info("census table written to %s", args.csv)
    return params, census.to_dict(limit=args.top), census.mass_identity_holds()


def _cmd_spectrum(args: argparse.Namespace):
    params = _graph_params(args)
    graph = resolve_graph(params)
    summary = spectrum_summary(graph, second_eigenvalue(graph))
    if args.edges:
        Path(args.edges).write_text(graph.dump_edges(), encoding="utf-8")
        logger.info("edge list written to %s", args.edges)
    return params, summary, summary["pass"]


def _cmd_mixing(args: argparse.Namespace):
    params = dict(_graph_params(args), trials=args.trials, seed=args.seed)
    report = verify_lemma("2.1", params)
    return params, report.to_dict(), report.passed


def _cmd_group(args: argparse.Namespace):
    params = {"q": args.q, "n": args.n, "matrices": args.matrices}
    rows: List[Dict[str, Any]] = []
    for q in args.q:
        for n in args.n:
            order = orthogonal_order(q, n)
            row: Dict[str, Any] = {"q": q, "n": n, "order": order}
            if n == 2:
                row["expected"] = 2 * (q + 1) if q % 4 == 3 else 2 * (q - 1)
            elif n == 3:
                row["ratio_to_2q3"] = Fraction(order, 2 * q**3)
            if args.matrices:
                row["matrices"] = [g.to_list() for g in enumerate_orthogonal(q, n)]
            rows.append(row)
    passed = all(r.get("expected", r["order"]) == r["order"] for r in rows)
    return params, {"orders": rows}, passed


def _cmd_verify_lemma(args: argparse.Namespace):
    params = dict(
        _pointset_params(args), m=args.m, k=args.k, lam=args.lam, graph=args.graph,
        trials=args.trials, constant=args.constant, declared_lambda=args.declared_lambda,
    )
    report = verify_lemma(args.lemma, params)
    return params, report.to_dict(), report.passed


def _cmd_chain(args: argparse.Namespace):
    params = dict(_pointset_params(args), k=args.k)
    report = verify_lemma("eq-2-chain", params)
    return params, report.to_dict(), report.passed


def _cmd_dds(args: argparse.Namespace):
    params = _pointset_params(args)
    pointset = resolve_pointset(params)
    seed = args.seed if args.seed is not None else settings.SEED
    result = dds_extract(pointset, seed)
    return dict(params, seed=seed), result.to_dict(), result.verified and result.meets_floor


def _cmd_thresholds(args: argparse.Namespace):
    params = {
        "q": args.q, "d": args.d, "k": args.k, "size": args.size, "sizes": args.sizes,
        "epsilon": args.epsilon, "input": args.input,
    }
    sizes, size, census = args.sizes, args.size, None
    if args.input:
        pointset = resolve_pointset({"input": args.input})
        size = len(pointset)
        sizes = [len(a) for a in pointset.sets] if pointset.is_product else None
        if args.k <= pointset.d:
            census = simplex_census(pointset, args.k)
    try:
        epsilon = Fraction(args.epsilon)
    except ValueError:
        raise UsageError(f"--epsilon must be rational, got {args.epsilon!r}") from None
    report = threshold_report(args.q, args.d, args.k, sizes=sizes, size=size, epsilon=epsilon, census=census)
    return params, report.to_dict(), True


COMMANDS = {
    "nu": _cmd_nu,
    "census": _cmd_census,
    "spectrum": _cmd_spectrum,
    "mixing": _cmd_mixing,
    "group": _cmd_group,
    "verify-lemma": _cmd_verify_lemma,
    "chain": _cmd_chain,
    "dds": _cmd_dds,
    "thresholds": _cmd_thresholds,
}


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _emit(document: Dict[str, Any], out: Optional[str]) -> None:
    text = dumps(document) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("result written to %s", out)
    else:
        sys.stdout.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv``, run the subcommand and return the exit code.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        0 when every check passed, 1 on a failed check, 2 on usage or cap errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as e:
        # --help and --version
        return EXIT_PASS if e.code in (0, None) else EXIT_ERROR

    configure_logging(args.log_level)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_ERROR
    if not settings.validate():
        print("invalid settings; check the FFS_* environment", file=sys.stderr)
        return EXIT_ERROR

    previous_threads = settings.THREADS
    if args.threads is not None:
        if args.threads < 1:
            print("--threads must be positive", file=sys.stderr)
            return EXIT_ERROR
        settings.THREADS = args.threads
    try:
        if args.command == "suite":
            result = run_suite(args.config, output_dir=args.out, threads=args.threads)
            return result.exit_code

        params, payload, passed = COMMANDS[args.command](args)
        config = ExperimentConfig(
            command=args.command, params=params, input=getattr(args, "input", None),
            output=args.out, threads=settings.THREADS,
        )
        _emit({"version": __version__, "config": config.to_dict(), "result": payload, "pass": passed}, args.out)
        return EXIT_PASS if passed else EXIT_FINDING
    except (ToolkitError, ValueError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        settings.THREADS = previous_threads


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
