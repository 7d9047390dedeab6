# Copyright 2018 Spotify AB. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""The shiftlab app - experiment registry, config validation and the runner."""
import csv
import itertools
import json
import logging
import os
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from copy import deepcopy
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Dict, List, NamedTuple, TextIO, Tuple

import numpy as np

from shiftlab import __version__
from shiftlab.data_store import DataStore
from shiftlab.diagnostics import CSV_COLUMNS, Verdict, verdict_row
from shiftlab.exceptions import ConfigValidationError
from shiftlab.fingerprint import dict_to_hash, filter_dict, payload_fingerprint, to_jsonable
from shiftlab.model import RunRecord

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

LOG = logging.getLogger(__name__)

SCHEMA_VERSION = 1
OUTPUT_FORMATS = ("json", "csv")
TOP_LEVEL_KEYS = {"experiment", "seed", "params", "output", "tolerances", "sweep", "expected_fail"}
PARAM_KINDS = ("int", "float", "bool", "str", "complex", "zeros", "atoms", "list")
DEFAULT_THREADS = 4

Schema = Dict[str, Tuple[str, Any]]


class ExperimentResult(NamedTuple):
    """What an experiment function returns.

    Args:
        verdicts (list): the Verdicts of the run
        results (dict): JSON-serializable measurements kept in the report
    """

    verdicts: List[Verdict]
    results: Dict[str, Any]


ExperimentFunc = Callable[[Dict[str, Any], Dict[str, float], np.random.Generator], ExperimentResult]


class Experiment(NamedTuple):
    name: str
    func: ExperimentFunc
    schema: Schema
    description: str


@dataclass
class ExperimentConfig:
    """A validated experiment configuration.

    Args:
        experiment (str): registered experiment name
        params (dict): parameters, complete with schema defaults
        seed (int): seed of the run's random generator
        output_path (str): report destination, empty for stdout
        output_format (str): "json" or "csv"
        tolerances (dict): per-run tolerance overrides
        sweep (dict): parameter name → list of values to fan out over
        expected_fail (list): verdict names allowed to fail
    """

    experiment: str
    params: Dict[str, Any]
    seed: int = 0
    output_path: str = ""
    output_format: str = "json"
    tolerances: Dict[str, float] = field(default_factory=dict)
    sweep: Dict[str, List[Any]] = field(default_factory=dict)
    expected_fail: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "params": deepcopy(self.params),
            "output": {"path": self.output_path, "format": self.output_format},
            "tolerances": dict(self.tolerances),
            "sweep": deepcopy(self.sweep),
            "expected_fail": list(self.expected_fail),
        }

    def fingerprint(self) -> str:
        """Hash of everything that determines the verdict payload (the output destination excluded)."""
        return dict_to_hash(filter_dict(self.to_dict(), ["output"]))


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _coerce_complex(value: Any, path: str) -> List[float]:
    if _is_number(value):
        return [float(value), 0.0]
    if isinstance(value, list) and len(value) == 2 and all(_is_number(part) for part in value):
        return [float(value[0]), float(value[1])]
    raise ConfigValidationError("expected a number or an [re, im] pair", path)


def coerce_param(kind: str, value: Any, path: str) -> Any:
    """Validate one parameter value against its schema kind and return its canonical JSON form.

    Raises:
        ConfigValidationError: if the value does not match the kind
    """
    if kind == "int":
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        raise ConfigValidationError("expected an integer", path)
    if kind == "float":
        if _is_number(value):
            return float(value)
        raise ConfigValidationError("expected a number", path)
    if kind == "bool":
        if isinstance(value, bool):
            return value
        raise ConfigValidationError("expected true or false", path)
    if kind == "str":
        if isinstance(value, str):
            return value
        raise ConfigValidationError("expected a string", path)
    if kind == "complex":
        return _coerce_complex(value, path)
    if kind == "zeros":
        if not isinstance(value, list):
            raise ConfigValidationError("expected a list of [re, im, multiplicity] zeros", path)
        zeros = []
        for index, entry in enumerate(value):
            if not isinstance(entry, list) or len(entry) not in (2, 3) or not all(_is_number(x) for x in entry):
                raise ConfigValidationError("expected [re, im] or [re, im, multiplicity]", f"{path}[{index}]")
            multiplicity = int(entry[2]) if len(entry) == 3 else 1
            zeros.append([float(entry[0]), float(entry[1]), multiplicity])
        return zeros
    if kind == "atoms":
        if not isinstance(value, list):
            raise ConfigValidationError("expected a list of [angle/π, weight] atoms", path)
        for index, entry in enumerate(value):
            if not isinstance(entry, list) or len(entry) != 2 or not all(_is_number(x) for x in entry):
                raise ConfigValidationError("expected [angle/π, weight]", f"{path}[{index}]")
        return [[float(angle), float(weight)] for angle, weight in value]
    if kind == "list":
        if isinstance(value, list):
            return deepcopy(value)
        raise ConfigValidationError("expected a list", path)
    raise ConfigValidationError(f"unknown parameter kind {kind!r}", path)


def load_config_file(path: str) -> Dict[str, Any]:
    """Parse a TOML experiment configuration.

    Raises:
        ConfigValidationError: if the file is missing or not valid TOML
    """
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except OSError as err:
        raise ConfigValidationError(f"cannot read config: {err}", path) from err
    except tomllib.TOMLDecodeError as err:
        raise ConfigValidationError(f"invalid TOML: {err}", path) from err


def dump_report(report: Dict[str, Any], handle: TextIO, output_format: str = "json") -> None:
    """Serialize a report to an open text stream, as JSON or as CSV verdict rows."""
    if output_format == "csv":
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for verdict in report["verdicts"]:
            writer.writerow(verdict_row(verdict))
    else:
        json.dump(report, handle, sort_keys=True, indent=2, default=to_jsonable)
        handle.write("\n")


def write_report(report: Dict[str, Any], path: str, output_format: str = "json") -> str:
    """Write a report to a file; returns the path written."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        dump_report(report, handle, output_format)
    return path


def thread_count() -> int:
    """Worker count for sweeps, bounded by SHIFTLAB_THREADS."""
    try:
        return max(1, int(os.environ.get("SHIFTLAB_THREADS", DEFAULT_THREADS)))
    except ValueError:
        LOG.warning("invalid-thread-count", extra={"value": os.environ.get("SHIFTLAB_THREADS")})
        return DEFAULT_THREADS


class ShiftLab:
    """The experiment registry and runner.

    Args:
        database_uri (str): optional archive database as an URI; no archive when None
    """

    def __init__(self, database_uri=None):
        self.experiments: Dict[str, Experiment] = {}
        self.data_store = DataStore(database_uri) if database_uri else None
        self._archive_lock = threading.Lock()

        self.default_tolerances = {
            "entry": 1e-9,
            # `entry` bounds entrywise agreement of matrices built two ways (Clark unitary vs measure, blocks)
            "round_trip": 1e-8,
            # `round_trip` bounds measure → inner → measure reconstruction errors
            "expansive": 1e-10,
            # `expansive` is the slack below zero allowed for the smallest eigenvalue of T*T − I
            "intertwining": 1e-9,
            # `intertwining` bounds ‖XA − BX‖ on the common trust band
            "left_inverse": 1e-9,
            # `left_inverse` bounds ‖L_T·T − I‖
            "double_dual": 1e-8,
            # `double_dual` bounds ‖(T')' − T‖
            "contraction": 1e-8,
            # `contraction` is the slack above 1 allowed for ‖T'‖ when T is expansive
            "rank": 1e-7,
            # `rank` is the relative singular value cut-off of numeric ranks
            "gram": 1e-10,
            # `gram` bounds orthonormality and decomposition residuals of model-space bases
            "box_sup": 4.1,
            # `box_sup` bounds the Carleson box supremum of a generated zero set
            "profile": 1e-6,
            # `profile` bounds the change of a truncation profile over its last two dimensions
            "lemma46_slack": 0.02,
            # `lemma46_slack` is the relative slack below the predicted column lower bounds
        }
        self.specific_configs: Dict[str, Dict[str, float]] = {}

    def set_config(self, experiment, config):
        """Override default tolerances for one experiment.

        Args:
            experiment (str): the experiment to override the tolerances for
            config (dict): the tolerance values to override
        """
        self.specific_configs[experiment] = config

    def register_experiment(self, name, schema=None, func=None, description=""):
        """Register an experiment function with its parameter schema.

        This method can be used either as a decorator or with a function passed in.

        Args:
            name (str): experiment name used in configs
            schema (dict): parameter name → (kind, default)
            func (Optional[function]): called as func(params, tolerances, rng), or None if used as a decorator
            description (str): one-line description for the catalog
        Return:
            function or None: if no func is given returns a decorator function, otherwise None
        """
        schema = schema or {}
        for key, (kind, _) in schema.items():
            if kind not in PARAM_KINDS:
                raise ConfigValidationError(f"unknown parameter kind {kind!r}", f"{name}.{key}")

        if not func:
            # pylint: disable=missing-return-doc, missing-return-type-doc
            def decorator(func):
                self.experiments[name] = Experiment(name, func, schema, description or (func.__doc__ or "").strip())
                return func

            return decorator

        self.experiments[name] = Experiment(name, func, schema, description or (func.__doc__ or "").strip())

    def list_experiments(self):
        """Catalog of registered experiments with their parameter schemas.

        Returns:
            dict: {"schema_version": int, "experiments": {name: {"description", "params"}}}
        """
        return {
            "schema_version": SCHEMA_VERSION,
            "experiments": {
                name: {
                    "description": experiment.description.splitlines()[0] if experiment.description else "",
                    "params": {
                        key: {"kind": kind, "default": default} for key, (kind, default) in experiment.schema.items()
                    },
                }
                for name, experiment in sorted(self.experiments.items())
            },
        }

    def history(self, experiment):
        """Archived runs of an experiment, oldest first.

        Args:
            experiment (str): experiment name
        Returns:
            list: one dict per run, without the stored report
        Raises:
            ConfigValidationError: if the lab has no archive
        """
        if not self.data_store:
            raise ConfigValidationError("history needs an archive", "archive")
        return [
            {
                "id": record.id,
                "ran_at": record.ran_at.isoformat() if record.ran_at else None,
                "version": record.version,
                "passed": record.passed,
                "config_fingerprint": record.config_fingerprint,
                "payload_fingerprint": record.payload_fingerprint,
            }
            for record in self.data_store.get_runs(experiment)
        ]

    def tolerances_for(self, experiment, overrides=None):
        """Resolved tolerance table: defaults, then set_config overrides, then per-run overrides."""
        tolerances = dict(self.default_tolerances)
        tolerances.update(self.specific_configs.get(experiment, {}))
        tolerances.update(overrides or {})
        return tolerances

    def validate(self, data):
        """Validate a parsed configuration mapping.

        Args:
            data (dict): the parsed TOML document
        Returns:
            ExperimentConfig: the validated configuration with defaults filled in
        Raises:
            ConfigValidationError: for unknown experiments, unknown keys or mistyped values
        """
        unknown = sorted(set(data) - TOP_LEVEL_KEYS)
        if unknown:
            raise ConfigValidationError(f"unknown keys {unknown}")
        name = data.get("experiment")
        if name not in self.experiments:
            raise ConfigValidationError(f"unknown experiment {name!r}", "experiment")
        schema = self.experiments[name].schema

        raw_params = data.get("params", {})
        if not isinstance(raw_params, dict):
            raise ConfigValidationError("expected a table", "params")
        unknown = sorted(set(raw_params) - set(schema))
        if unknown:
            raise ConfigValidationError(f"unknown parameters {unknown}", "params")
        params = {}
        for key, (kind, default) in schema.items():
            value = raw_params.get(key, default)
            params[key] = coerce_param(kind, value, f"params.{key}")

        seed = data.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigValidationError("expected a non-negative integer", "seed")

        output = data.get("output", {})
        if not isinstance(output, dict) or set(output) - {"path", "format"}:
            raise ConfigValidationError("expected a table with path and format", "output")
        output_format = output.get("format", "json")
        if output_format not in OUTPUT_FORMATS:
            raise ConfigValidationError(f"format must be one of {OUTPUT_FORMATS}", "output.format")
        output_path = output.get("path", "")
        if not isinstance(output_path, str):
            raise ConfigValidationError("expected a string", "output.path")

        tolerances = data.get("tolerances", {})
        if not isinstance(tolerances, dict):
            raise ConfigValidationError("expected a table", "tolerances")
        unknown = sorted(set(tolerances) - set(self.default_tolerances))
        if unknown:
            raise ConfigValidationError(f"unknown tolerances {unknown}", "tolerances")
        tolerances = {key: coerce_param("float", value, f"tolerances.{key}") for key, value in tolerances.items()}

        sweep = data.get("sweep", {})
        if not isinstance(sweep, dict):
            raise ConfigValidationError("expected a table", "sweep")
        checked_sweep = {}
        for key, values in sweep.items():
            if key not in schema:
                raise ConfigValidationError("unknown parameter", f"sweep.{key}")
            if not isinstance(values, list) or not values:
                raise ConfigValidationError("expected a non-empty list", f"sweep.{key}")
            kind = schema[key][0]
            checked_sweep[key] = [coerce_param(kind, value, f"sweep.{key}[{i}]") for i, value in enumerate(values)]

        expected_fail = data.get("expected_fail", [])
        if not isinstance(expected_fail, list) or not all(isinstance(item, str) for item in expected_fail):
            raise ConfigValidationError("expected a list of verdict names", "expected_fail")

        return ExperimentConfig(
            name, params, seed, output_path, output_format, tolerances, checked_sweep, list(expected_fail)
        )

    def run(self, config):
        """Run one experiment configuration.

        Library exceptions propagate; the caller maps them to exit codes.

        Args:
            config (ExperimentConfig): a validated configuration without a sweep
        Returns:
            dict: the report {config, verdicts, results, tolerances, version, passed, unexpected_failures,
                fingerprint, envelope, artifacts}
        """
        experiment = self.experiments[config.experiment]
        tolerances = self.tolerances_for(config.experiment, config.tolerances)
        started_at = datetime.utcnow()
        clock = time.perf_counter()
        LOG.info("experiment-started", extra={"experiment": config.experiment, "seed": config.seed})

        result = experiment.func(deepcopy(config.params), tolerances, np.random.default_rng(config.seed))
        verdicts = [verdict.to_dict() for verdict in result.verdicts]
        report = self._report(config, verdicts, tolerances, {"results": result.results})
        report["envelope"] = {
            "started_at": started_at.isoformat(),
            "finished_at": datetime.utcnow().isoformat(),
            "seconds": time.perf_counter() - clock,
        }
        LOG.info(
            "experiment-finished",
            extra={"experiment": config.experiment, "passed": report["passed"], "verdicts": len(verdicts)},
        )
        self._archive(config, report)
        return report

    def run_sweep(self, config):
        """Run the configuration once per point of its sweep grid on a bounded thread pool.

        Points are ordered lexicographically by parameter name, then by the listed value order; the merged report
        keeps that order whatever the completion order.

        Args:
            config (ExperimentConfig): a validated configuration
        Returns:
            dict: the merged report with one entry per sweep point under "runs"
        """
        if not config.sweep:
            return self.run(config)
        keys = sorted(config.sweep)
        points = [dict(zip(keys, values)) for values in itertools.product(*(config.sweep[key] for key in keys))]
        configs = [
            ExperimentConfig(
                config.experiment,
                {**config.params, **point},
                config.seed,
                "",
                config.output_format,
                config.tolerances,
                {},
                config.expected_fail,
            )
            for point in points
        ]
        started_at = datetime.utcnow()
        clock = time.perf_counter()
        workers = min(thread_count(), len(configs))
        LOG.info("sweep-started", extra={"experiment": config.experiment, "points": len(configs), "workers": workers})
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(self.run, configs))

        verdicts = []
        for point, run in zip(points, runs):
            for verdict in run["verdicts"]:
                verdicts.append({**verdict, "params": {**verdict["params"], "sweep": point}})
        tolerances = self.tolerances_for(config.experiment, config.tolerances)
        extra = {
            "sweep": points,
            "runs": [{key: run[key] for key in ("results", "fingerprint", "passed")} for run in runs],
        }
        report = self._report(config, verdicts, tolerances, extra)
        report["envelope"] = {
            "started_at": started_at.isoformat(),
            "finished_at": datetime.utcnow().isoformat(),
            "seconds": time.perf_counter() - clock,
        }
        return report

    def _report(self, config, verdicts, tolerances, extra):
        unexpected = sorted({v["name"] for v in verdicts if not v["pass"] and v["name"] not in config.expected_fail})
        report = {
            "config": config.to_dict(),
            "verdicts": verdicts,
            "tolerances": tolerances,
            "version": __version__,
            "passed": not unexpected,
            "unexpected_failures": unexpected,
            "artifacts": {"paths": []},
            **extra,
        }
        report["fingerprint"] = payload_fingerprint(report)
        return report

    def _archive(self, config, report):
        if not self.data_store:
            return
        config_fingerprint = config.fingerprint()
        # sweep points archive from worker threads
        with self._archive_lock:
            previous = self.data_store.get_latest_run(config_fingerprint)
            if previous and previous.payload_fingerprint != report["fingerprint"]:
                LOG.warning(
                    "determinism-drift",
                    extra={
                        "experiment": config.experiment,
                        "previous": previous.payload_fingerprint,
                        "current": report["fingerprint"],
                    },
                )
            self.data_store.add_record(
                RunRecord(
                    experiment=config.experiment,
                    config_fingerprint=config_fingerprint,
                    payload_fingerprint=report["fingerprint"],
                    version=__version__,
                    passed=report["passed"],
                    report=filter_dict(deepcopy(report), ["envelope"]),
                )
            )
