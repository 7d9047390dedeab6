"""Command line entry point: `shiftlab run|list|validate|history`.

Exit codes: 0 when every verdict passes (or fails as expected), 1 when a verdict fails unexpectedly, 2 for invalid
configurations or arguments, 3 for numerical failures and failed linear algebra.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from shiftlab.app import OUTPUT_FORMATS, dump_report, load_config_file, write_report
from shiftlab.exceptions import (
    ConfigValidationError,
    InvalidArgumentError,
    InvariantViolation,
    NumericalFailure,
    UnsupportedError,
)
from shiftlab.experiments import create_lab

LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

# tolerances a bare --tol overrides
TOL_KEYS = ("entry", "intertwining")
# flags that set a parameter, applied only where the experiment has it
PARAM_FLAGS = (("dim", "n"), ("grid", "grid"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiftlab", description="Numerical experiments on Hardy-space operators.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    parser.add_argument("--archive", metavar="URI", default=None, help="SQLAlchemy URI of the run archive")
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("list", help="print the experiment catalog as JSON")
    history = subparsers.add_parser("history", help="print the archived runs of an experiment as JSON")
    history.add_argument("experiment", help="experiment name")

    for name, help_text in (("run", "run an experiment configuration"), ("validate", "validate a configuration")):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("config", help="TOML configuration file")
        sub.add_argument("--out", metavar="PATH", help="report destination, stdout when omitted")
        sub.add_argument("--format", choices=OUTPUT_FORMATS, help="report format")
        sub.add_argument("--seed", type=int, help="seed of the random generator")
        sub.add_argument("--dim", type=int, help="truncation dimension (params.n)")
        sub.add_argument("--grid", type=int, help="boundary grid size (params.grid)")
        sub.add_argument("--tol", type=float, help="override the entry and intertwining tolerances")
    return parser


def _table(data: Dict[str, Any], key: str) -> Dict[str, Any]:
    table = data.setdefault(key, {})
    if not isinstance(table, dict):
        raise ConfigValidationError("expected a table", key)
    return table


def apply_overrides(
    data: Dict[str, Any], args: argparse.Namespace, schema: Optional[Mapping[str, Any]] = None
) -> Dict[str, Any]:
    """Merge command line flags into a parsed configuration; flags win over the file.

    --dim and --grid are skipped with a warning when `schema` is given and lacks their parameter.
    """
    if args.seed is not None:
        data["seed"] = args.seed
    for flag, key in PARAM_FLAGS:
        value = getattr(args, flag)
        if value is None:
            continue
        if schema is not None and key not in schema:
            LOG.warning(
                "override-ignored", extra={"flag": f"--{flag}", "param": key, "experiment": data.get("experiment")}
            )
            continue
        _table(data, "params")[key] = value
    if args.out is not None:
        _table(data, "output")["path"] = args.out
    if args.format is not None:
        _table(data, "output")["format"] = args.format
    if args.tol is not None:
        tolerances = _table(data, "tolerances")
        for key in TOL_KEYS:
            tolerances[key] = args.tol
    return data


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(asctime)s %(levelname)s %(name)s %(message)s")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    try:
        lab = create_lab(args.archive)
        if args.command == "list":
            json.dump(lab.list_experiments(), sys.stdout, sort_keys=True, indent=2)
            sys.stdout.write("\n")
            return EXIT_OK

        if args.command == "history":
            json.dump(lab.history(args.experiment), sys.stdout, indent=2)
            sys.stdout.write("\n")
            return EXIT_OK

        data = load_config_file(args.config)
        name = data.get("experiment")
        experiment = lab.experiments.get(name) if isinstance(name, str) else None
        config = lab.validate(apply_overrides(data, args, experiment.schema if experiment else None))
        if args.command == "validate":
            print(f"ok: {config.experiment} ({config.fingerprint()[:12]})")
            return EXIT_OK

        report = lab.run_sweep(config)
        if config.output_path:
            report["artifacts"]["paths"].append(config.output_path)
            write_report(report, config.output_path, config.output_format)
            LOG.info("report-written", extra={"path": config.output_path, "format": config.output_format})
        else:
            dump_report(report, sys.stdout, config.output_format)
    except (ConfigValidationError, InvalidArgumentError, UnsupportedError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        if err.report:
            print(json.dumps(err.report, sort_keys=True, default=str), file=sys.stderr)
        return EXIT_NUMERICAL
    except InvariantViolation as err:
        print(f"invariant violation: {err} (residual {err.residual:.3e})", file=sys.stderr)
        return EXIT_NUMERICAL
    except np.linalg.LinAlgError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL

    if not report["passed"]:
        LOG.warning("unexpected-failures", extra={"verdicts": report["unexpected_failures"]})
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
