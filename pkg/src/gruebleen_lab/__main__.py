"""
Command-line entry point that coordinates schema loading, suites and reports.
"""

import argparse
import json
import logging
import sys
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from gruebleen_lab.config_loader import Config, RunConfig
from gruebleen_lab.report import CheckEntry, Report, Status
from gruebleen_lab.schema_core import (
    KinematicMap,
    SchemaError,
    SimilarityGroup,
    SizeGuardError,
    TheorySchema,
    candidate_similarity_group,
    label_induced_candidates,
    load_schema_file,
    maximal_similarity_group,
    random_bijections,
)
from gruebleen_lab.suites import DEMOS, SUITES

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)


class LabRunner:
    """Runs suites for one command and collects their entries into a report."""

    def __init__(self, run_config: RunConfig, exit_on_error: bool = False):
        """
        Args:
            run_config: Settings shared by every suite
            exit_on_error: If True, re-raise suite errors instead of recording a FAIL
        """
        self.run_config = run_config
        self.exit_on_error = exit_on_error

    def _run_suite(self, name: str, report: Report):
        logger.info(f"Running suite '{name}'...")
        try:
            report.extend(SUITES[name](self.run_config))
        except Exception as e:
            logger.error(f"Error in suite '{name}': {e}", exc_info=True)
            if self.exit_on_error:
                raise
            report.add(CheckEntry(f"{name} suite", Status.FAIL, note=f"{type(e).__name__}: {e}"))
        logger.info(f"Suite '{name}' finished")

    def demo(self, name: str) -> Report:
        report = Report(f"demo {name}", self.run_config)
        self._run_suite(name, report)
        return report

    def verify(self, target: str) -> Report:
        report = Report(f"verify {target}", self.run_config)
        names = list(DEMOS) + ["theorem"] if target == "all" else [target]
        for name in names:
            self._run_suite(name, report)
        return report

    def generated_candidates(self, schema: TheorySchema) -> List[KinematicMap]:
        """K, label-induced maps, their products with K, and seeded random bijections."""
        induced = label_induced_candidates(schema)
        candidates = list(schema.maps) + induced
        for V in induced:
            candidates.extend(schema.compose(V, D) for D in schema.maps)
        rng = np.random.default_rng(self.run_config.seed)
        candidates.extend(random_bijections(schema, self.run_config.random_candidates, rng))
        return candidates

    def maximal_group(self, schema: TheorySchema, candidates: Optional[List[Any]]) -> Report:
        report = Report("maximal-group", self.run_config)
        guard = self.run_config.max_states_exhaustive
        if candidates is None and len(schema.states) > guard:
            logger.warning(
                f"|S|={len(schema.states)} exceeds the exhaustive guard {guard}; "
                f"falling back to a candidate-restricted search"
            )
            candidates = self.generated_candidates(schema)
        try:
            if candidates is None:
                group: SimilarityGroup = maximal_similarity_group(schema, guard)
            else:
                group = candidate_similarity_group(schema, candidates)
        except Exception as e:
            logger.error(f"Similarity search failed: {e}", exc_info=True)
            if self.exit_on_error:
                raise
            report.add(CheckEntry("similarity search", Status.FAIL, note=f"{type(e).__name__}: {e}"))
            return report
        report.add(CheckEntry("search mode", Status.PASS, group.source))
        report.add(
            CheckEntry(
                "similarity group order",
                Status.PASS,
                len(group),
                witness={"elements": [m.to_dict() for m in group.maps]},
            )
        )
        report.add(CheckEntry.expect("closed under composition and inverse", group.closed, True))
        if schema.reversible:
            report.add(
                CheckEntry.expect("K is contained in the group", all(D in group for D in schema.maps), True)
            )
        return report


def _load_candidates(path: str) -> List[Any]:
    with open(path, "r") as f:
        data = json.load(f)
    if not isinstance(data, list):
        raise SchemaError("Candidate file must contain a JSON array")
    return [KinematicMap.from_dict(c) if isinstance(c, dict) else c for c in data]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="Path to a YAML config file")
    common.add_argument("--tolerance", type=float, default=None, help="Metric equality tolerance")
    common.add_argument("--seed", type=int, default=None, help="Random seed")
    common.add_argument("--steps", type=int, default=None, help="RK4 step budget")
    common.add_argument("--size", type=int, default=None, help="State count for 'verify theorem'")
    common.add_argument("--json", default=None, help="Write the JSON report here instead of stdout")
    common.add_argument("--log-file", default=None, help="Also write logs to this file")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    common.add_argument(
        "-E",
        "--exit-on-error",
        action="store_true",
        help="Exit the process on first uncaught error",
    )

    parser = argparse.ArgumentParser(prog="gruebleen-lab", description="Theory-schema verification lab")
    commands = parser.add_subparsers(dest="command", required=True)
    demo = commands.add_parser("demo", parents=[common], help="Run one demonstration suite")
    demo.add_argument("name", choices=DEMOS)
    verify = commands.add_parser("verify", parents=[common], help="Run verification suites")
    verify.add_argument("target", choices=("theorem", "all"))
    maximal = commands.add_parser(
        "maximal-group", parents=[common], help="Similarity group of a schema file"
    )
    maximal.add_argument("--schema", required=True, help="Schema JSON file")
    maximal.add_argument(
        "--candidates",
        nargs="?",
        const="",
        default=None,
        help="Test candidate bijections instead of enumerating; optional JSON file of tables",
    )
    return parser


def _configure_logging(verbose: bool, log_file: Optional[str]):
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        handlers=handlers,
    )


def run_command(argv: Sequence[str], configure_logging: bool = False) -> Tuple[int, Optional[Report]]:
    """
    Parse argv, run the command and emit its report.

    Returns:
        The exit code (0 PASS, 1 FAIL, 2 usage or input error) and the report
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return (e.code if isinstance(e.code, int) else 2), None

    if configure_logging:
        _configure_logging(args.verbose, args.log_file)

    schema = None
    candidates = None
    try:
        run_config = Config(args.config).run_config(
            tolerance=args.tolerance, seed=args.seed, steps=args.steps, size=args.size
        )
        if run_config.size is not None and run_config.size > run_config.max_states_exhaustive:
            raise SizeGuardError(
                f"--size {run_config.size} exceeds max_states_exhaustive={run_config.max_states_exhaustive}"
            )
        runner = LabRunner(run_config, exit_on_error=args.exit_on_error)
        if args.command == "maximal-group":
            schema = load_schema_file(args.schema)
            if args.candidates == "":
                candidates = runner.generated_candidates(schema)
            elif args.candidates is not None:
                candidates = [schema.coerce_map(c) for c in _load_candidates(args.candidates)]
    except (FileNotFoundError, yaml.YAMLError, ValueError) as e:
        # SchemaError and JSON decoding errors are ValueErrors.
        logger.error(f"Invalid input: {e}")
        return 2, None

    if args.command == "demo":
        report = runner.demo(args.name)
    elif args.command == "verify":
        report = runner.verify(args.target)
    else:
        report = runner.maximal_group(schema, candidates)

    if args.json:
        with open(args.json, "w") as f:
            report.write(f)
        logger.info(f"Report written to {args.json}")
    else:
        report.write(sys.stdout)
    print(report.summary(), file=sys.stderr)
    return report.exit_code, report


def main(argv: Optional[Sequence[str]] = None):
    """Main entry point."""
    code, _ = run_command(sys.argv[1:] if argv is None else argv, configure_logging=True)
    sys.exit(code)


if __name__ == "__main__":
    main()
