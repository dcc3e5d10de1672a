"""Loading run configurations and turning them into library objects."""

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from dataclasses import field

import yaml

from . import curved
from . import exceptions
from . import quadrature
from . import rgflow
from . import scalinglimit
from . import spectral
from . import testfn
from .validate import validate

LOGGER = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "SCALELAB_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "scalelab-output"


def load_config(path):
    """Read a YAML configuration file.

    :raises ConfigError: on unreadable files, YAML syntax errors (with the
        offending line) or a document that is not a mapping.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            config = yaml.safe_load(handle)
    except OSError as err:
        raise exceptions.ConfigError(f"Cannot read configuration {path}: {err}")
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise exceptions.ConfigError(f"Invalid YAML in {path}: {err}", line=line)
    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise exceptions.ConfigError(f"Configuration {path} is not a mapping")
    return config


def config_hash(config):
    """sha256 of the canonical JSON rendering of ``config``."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def output_dir(config, override=None):
    """``--out`` beats ``SCALELAB_OUTPUT_DIR`` beats ``output.dir``."""
    return (
        override
        or os.environ.get(OUTPUT_DIR_ENV)
        or config.get("output", {}).get("dir")
        or DEFAULT_OUTPUT_DIR
    )


@dataclass
class RunConfig:
    """A validated configuration with its library objects built."""

    command: str
    raw: dict
    sha256: str
    threads: int = 1
    seed: int = 0
    model: spectral.ModelSpec = None
    functions: dict = field(default_factory=dict)
    renorm: object = None
    probes: list = field(default_factory=list)
    sequences: list = field(default_factory=list)
    tolerances: scalinglimit.Tolerances = scalinglimit.DEFAULT_TOLERANCES
    settings: quadrature.QuadratureSettings = quadrature.DEFAULT_SETTINGS

    @property
    def prefix(self):
        return self.raw.get("output", {}).get("prefix", self.command)

    def section(self, name):
        return self.raw.get(name) or {}

    def orbit(self, name):
        return rgflow.ScalingOrbit(self.functions[name], self.renorm)


def build_renorm(record, model, functions):
    record = record or {}
    kind = record.get("kind", "auto")
    if kind == "power_law":
        delta = record.get("delta", "canonical")
        if delta == "canonical":
            delta = rgflow.canonical_exponent(model.dim)
        return rgflow.PowerLaw(float(record.get("c", 1.0)), float(delta))
    if kind == "tabulated":
        return rgflow.Tabulated(tuple(record["lambdas"]), tuple(record["values"]))
    reference = record.get("reference")
    if reference is None:
        reference = sorted(functions)[0]
    return rgflow.AutoNormalized(functions[reference])


def build_sequence(record):
    return scalinglimit.LambdaSequence(**(record or {}))


def build_chart(section):
    spacetime = curved.SpacetimeModel.from_record(section.get("spacetime", {}))
    chart = section.get("chart", {})
    base_point = chart.get("base_point")
    if base_point is None:
        base_point = [0.0] * spacetime.dim
        if spacetime.kind == curved.DE_SITTER:
            base_point[0] = -1.0 / spacetime.hubble
        elif spacetime.kind == curved.POWER_LAW:
            base_point[0] = 1.0
    options = {key: chart[key] for key in ("max_radius", "rtol", "atol") if key in chart}
    return curved.NormalChart(spacetime, tuple(base_point), **options)


def build(config, command, threads=None):
    """Validate ``config`` for ``command`` and build a :class:`RunConfig`.

    :raises ConfigError: with the validation errors, or when a value is
        rejected while building the objects.
    """
    is_valid, report = validate(config, command)
    if not is_valid:
        raise exceptions.ConfigError(report["report"], errors=report["errors"])
    try:
        run = RunConfig(
            command=command,
            raw=config,
            sha256=config_hash(config),
            threads=int(threads or config.get("threads", 1)),
            seed=int(config.get("seed", 0)),
            tolerances=scalinglimit.Tolerances(**config.get("tolerances", {})),
            settings=quadrature.QuadratureSettings.from_record(config.get("quadrature")),
        )
        if "model" in config:
            run.model = spectral.ModelSpec.from_record(config["model"])
            run.functions = {
                name: testfn.TestFunction.from_record(run.model.dim, record)
                for name, record in config.get("functions", {}).items()
            }
            if run.functions:
                run.renorm = build_renorm(config.get("renorm"), run.model, run.functions)
            run.probes = [(run.orbit(f), run.orbit(g)) for f, g in config.get("probes", [])]
            run.sequences = [build_sequence(seq) for seq in config.get("sequences", [])]
    except exceptions.DomainError as err:
        raise exceptions.ConfigError(f"Invalid configuration value: {err}")
    LOGGER.debug("Configuration %s validated for %s", run.sha256[:12], command)
    return run
