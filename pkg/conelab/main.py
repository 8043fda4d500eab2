"""
conelab command-line harness.

Subcommands:
- identities: Jordan-core and operator-space invariants
- geometry: cone and group geometry invariants
- minimality: geodesic and group minimality margins
- lift: horizontal lifts and the quotient distance
- explore: G(Omega) competitors of a one-parameter automorphism group

Exit codes: 0 when the suite passes, 1 on a suite failure, 2 on a configuration error.
"""

import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

from pydantic import ValidationError

from conelab import __version__
from conelab.config import get_settings
from conelab.errors import AlgebraSpecError, HypothesisViolationError
from conelab.models import ErrorResponse, SuiteConfig, SuiteName
from conelab.services import explore_open_question, run_geometry, run_identities, run_lift, run_minimality
from conelab.services.reporting import report_csv, rows_csv, write_report, write_rows, write_text

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    """Bad command-line input, reported with exit status 2."""


def _parse_tolerances(items: Optional[List[str]]) -> Dict[str, float]:
    overrides: Dict[str, float] = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ConfigError(f"--tol expects NAME=VALUE, got '{item}'")
        try:
            overrides[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {name}: '{value}' is not a number")
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conelab", description="Symmetric cone geometry lab")
    parser.add_argument("--version", action="version", version=f"conelab {__version__}")
    sub = parser.add_subparsers(dest="suite", required=True)
    for suite in SuiteName:
        cmd = sub.add_parser(suite.value)
        cmd.add_argument("--algebra", default="sym:2", help="sym:n | spin:k | rn:k | sum:A+B")
        cmd.add_argument("--trials", type=int, default=100)
        cmd.add_argument("--seed", type=int, default=0)
        cmd.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a check threshold")
        cmd.add_argument("--out", help="report path (.json for JSON, CSV otherwise)")
        cmd.add_argument("--data", help="CSV path for experiment rows")
        if suite == SuiteName.EXPLORE:
            cmd.add_argument("--scale", type=float, default=1.0, help="operator norm of the derivation D")
    return parser


def config_from_args(args: argparse.Namespace) -> SuiteConfig:
    return SuiteConfig(
        suite=SuiteName(args.suite),
        algebra=args.algebra,
        trials=args.trials,
        seed=args.seed,
        tolerances=_parse_tolerances(args.tol),
        out=args.out,
        data=args.data,
        scale=getattr(args, "scale", 1.0),
    )


def _config_error(exc: Exception) -> int:
    details = None
    if isinstance(exc, ValidationError):
        details = [{"loc": list(e["loc"]), "msg": e["msg"]} for e in exc.errors()]
    response = ErrorResponse(error=type(exc).__name__, message=str(exc).splitlines()[0], details=details)
    print(json.dumps(response.model_dump(), sort_keys=True), file=sys.stderr)
    return EXIT_CONFIG


def run(config: SuiteConfig) -> int:
    """Run one subcommand and write its outputs; returns the exit status."""
    if config.suite == SuiteName.EXPLORE:
        rows = explore_open_question(config)
        text = rows_csv(rows)
        if config.data or config.out:
            write_text(config.data or config.out, text)
        else:
            sys.stdout.write(text)
        return EXIT_PASS

    rows = []
    if config.suite == SuiteName.IDENTITIES:
        report = run_identities(config)
    elif config.suite == SuiteName.GEOMETRY:
        report = run_geometry(config)
    elif config.suite == SuiteName.MINIMALITY:
        report, rows = run_minimality(config)
    else:
        report, rows = run_lift(config)

    if config.out:
        write_report(report, config.out)
    else:
        sys.stdout.write(report_csv(report))
    if config.data:
        write_rows(rows, config.data)
    return EXIT_PASS if report.passed else EXIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        return run(config)
    except (ConfigError, ValidationError, AlgebraSpecError, HypothesisViolationError) as exc:
        return _config_error(exc)


if __name__ == "__main__":
    sys.exit(main())
