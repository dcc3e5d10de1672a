"""Schema validation of run configurations.

:func:`validate` checks a configuration mapping (as loaded from YAML)
against the grammar documented in ``docs/config.rst`` and returns a boolean
together with a report, in the manner of an XML schema validator: nothing
is computed before a configuration validates.
"""

import numbers

from . import quadrature
from . import spectral
from . import utils

COMMANDS = ("limit", "classify", "emt", "stability")

TOP_LEVEL_KEYS = {
    "command",
    "seed",
    "threads",
    "model",
    "functions",
    "renorm",
    "probes",
    "sequences",
    "tolerances",
    "quadrature",
    "limit",
    "emt",
    "stability",
    "output",
}
REQUIRED_SECTIONS = {
    "limit": ("model", "functions", "probes", "sequences"),
    "classify": ("model", "functions", "probes", "sequences"),
    "emt": ("model", "functions", "emt"),
    "stability": ("stability",),
}
RENORM_KINDS = ("auto", "power_law", "tabulated")
PACKET_KEYS = {"widths", "width_matrix", "center", "modulation", "amplitude", "poly"}
SEQUENCE_KEYS = {"lambda0", "ratio", "length", "phase"}
TOLERANCE_KEYS = {"conv", "triv", "deg", "stab"}
QUADRATURE_KEYS = set(quadrature.DEFAULT_SETTINGS.to_record())
SPACETIME_KINDS = ("minkowski", "power_law", "de_sitter")


class _Checker:
    """Collects ``(path, message)`` pairs while walking a configuration."""

    def __init__(self):
        self.errors = []

    def error(self, path, message):
        self.errors.append((path, message))

    def mapping(self, value, path, allowed=None):
        if not isinstance(value, dict):
            self.error(path, "must be a mapping")
            return False
        if allowed is not None:
            for key in sorted(set(value) - set(allowed), key=str):
                self.error(f"{path}.{key}", "unknown key")
        return True

    def sequence(self, value, path, minimum=0):
        if not isinstance(value, (list, tuple)):
            self.error(path, "must be a list")
            return False
        if len(value) < minimum:
            self.error(path, f"must have at least {minimum} entries")
            return False
        return True

    def number(self, value, path, low=None, high=None, strict=True):
        if isinstance(value, bool) or not isinstance(value, numbers.Real):
            self.error(path, "must be a number")
            return False
        if low is not None and (value <= low if strict else value < low):
            self.error(path, f"must be {'>' if strict else '>='} {low}")
            return False
        if high is not None and (value >= high if strict else value > high):
            self.error(path, f"must be {'<' if strict else '<='} {high}")
            return False
        return True

    def integer(self, value, path, low=None):
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            self.error(path, "must be an integer")
            return False
        if low is not None and value < low:
            self.error(path, f"must be >= {low}")
            return False
        return True

    def vector(self, value, path, dim):
        if not self.sequence(value, path):
            return False
        if dim is not None and len(value) != dim:
            self.error(path, f"must have {dim} components")
            return False
        return all(self.number(item, f"{path}[{i}]") for i, item in enumerate(value))


####################################
# SECTIONS                         #
####################################


def _check_measure(check, measure, path, dim):
    if not check.mapping(measure, path, {"atoms", "density"}):
        return
    atoms = measure.get("atoms", [])
    if check.sequence(atoms, f"{path}.atoms"):
        for index, atom in enumerate(atoms):
            where = f"{path}.atoms[{index}]"
            if check.mapping(atom, where, {"mass", "weight"}):
                if "mass" not in atom:
                    check.error(where, "missing mass")
                elif check.number(atom["mass"], f"{where}.mass", 0, strict=False):
                    if dim == 2 and atom["mass"] == 0:
                        check.error(f"{where}.mass", "massless atoms are not allowed in d=2")
                if "weight" in atom:
                    check.number(atom["weight"], f"{where}.weight", 0)
    density = measure.get("density")
    if density is not None:
        where = f"{path}.density"
        allowed = {"support", "power", "log_periodic", "cutoff", "nodes", "rule"}
        if check.mapping(density, where, allowed):
            support = density.get("support")
            if check.vector(support, f"{where}.support", 2):
                low, high = support
                if not 0 <= low < high:
                    check.error(f"{where}.support", "must satisfy 0 <= m_lo < m_hi")
                elif dim == 2 and low == 0:
                    check.error(f"{where}.support", "must start above 0 in d=2")
            if "power" in density:
                check.number(density["power"], f"{where}.power")
            if "cutoff" in density:
                check.number(density["cutoff"], f"{where}.cutoff", 0)
            if "nodes" in density:
                check.integer(density["nodes"], f"{where}.nodes", 4)
            if density.get("rule", "legendre") not in spectral.RULES:
                check.error(f"{where}.rule", f"must be one of {list(spectral.RULES)}")
            modulation = density.get("log_periodic")
            if modulation is not None:
                sub = f"{where}.log_periodic"
                if check.mapping(modulation, sub, {"epsilon", "tau", "m1"}):
                    check.number(modulation.get("epsilon"), f"{sub}.epsilon", 0, 1, strict=False)
                    if modulation.get("epsilon") == 1:
                        check.error(f"{sub}.epsilon", "must be < 1")
                    check.number(modulation.get("tau"), f"{sub}.tau", 1)
                    if "m1" in modulation:
                        check.number(modulation["m1"], f"{sub}.m1", 0)
    if not atoms and density is None:
        check.error(path, "needs atoms or a density")


def _check_model(check, model):
    if not check.mapping(model, "model", {"dim", "measure", "label"}):
        return None
    dim = model.get("dim")
    if dim not in utils.SPACETIME_DIMS:
        check.error("model.dim", f"must be one of {list(utils.SPACETIME_DIMS)}")
        dim = None
    if "measure" not in model:
        check.error("model.measure", "missing")
    else:
        _check_measure(check, model["measure"], "model.measure", dim)
    return dim


def _check_packet(check, record, path, dim):
    if not check.mapping(record, path, PACKET_KEYS):
        return
    if "widths" in record:
        widths = record["widths"]
        if isinstance(widths, (list, tuple)):
            if check.vector(widths, f"{path}.widths", dim):
                for i, width in enumerate(widths):
                    check.number(width, f"{path}.widths[{i}]", 0)
        else:
            check.number(widths, f"{path}.widths", 0)
    for key in ("center", "modulation"):
        if key in record:
            check.vector(record[key], f"{path}.{key}", dim)
    if "poly" in record and check.sequence(record["poly"], f"{path}.poly"):
        for i, term in enumerate(record["poly"]):
            where = f"{path}.poly[{i}]"
            if check.mapping(term, where, {"exponents", "coefficient"}):
                exponents = term.get("exponents")
                if check.sequence(exponents, f"{where}.exponents"):
                    if dim is not None and len(exponents) != dim:
                        check.error(f"{where}.exponents", f"must have {dim} entries")
                    for j, power in enumerate(exponents):
                        check.integer(power, f"{where}.exponents[{j}]", 0)


def _check_functions(check, functions, dim):
    if not check.mapping(functions, "functions"):
        return set()
    for name, record in functions.items():
        path = f"functions.{name}"
        if isinstance(record, dict) and "packets" in record:
            if check.sequence(record["packets"], f"{path}.packets", 1):
                for i, packet in enumerate(record["packets"]):
                    _check_packet(check, packet, f"{path}.packets[{i}]", dim)
        else:
            _check_packet(check, record, path, dim)
    return set(functions)


def _check_name(check, name, path, names):
    if name not in names:
        check.error(path, f"unknown function {name!r}")


def _check_renorm(check, renorm, names):
    if not check.mapping(renorm, "renorm"):
        return
    kind = renorm.get("kind", "auto")
    if kind not in RENORM_KINDS:
        check.error("renorm.kind", f"must be one of {list(RENORM_KINDS)}")
    elif kind == "auto":
        check.mapping(renorm, "renorm", {"kind", "reference"})
        if "reference" in renorm:
            _check_name(check, renorm["reference"], "renorm.reference", names)
    elif kind == "power_law":
        check.mapping(renorm, "renorm", {"kind", "c", "delta"})
        if "c" in renorm:
            check.number(renorm["c"], "renorm.c", 0)
        if renorm.get("delta", "canonical") != "canonical":
            check.number(renorm["delta"], "renorm.delta")
    else:
        check.mapping(renorm, "renorm", {"kind", "lambdas", "values"})
        for key in ("lambdas", "values"):
            if check.sequence(renorm.get(key), f"renorm.{key}", 2):
                for i, value in enumerate(renorm[key]):
                    check.number(value, f"renorm.{key}[{i}]", 0)


def _check_probes(check, probes, names):
    if not check.sequence(probes, "probes", 1):
        return
    for i, pair in enumerate(probes):
        path = f"probes[{i}]"
        if not check.sequence(pair, path) or len(pair) != 2:
            check.error(path, "must be a pair of function names")
            continue
        for j, name in enumerate(pair):
            _check_name(check, name, f"{path}[{j}]", names)


def _check_sequence(check, seq, path):
    if not check.mapping(seq, path, SEQUENCE_KEYS):
        return
    if "lambda0" in seq:
        check.number(seq["lambda0"], f"{path}.lambda0", 0)
    if "ratio" in seq:
        check.number(seq["ratio"], f"{path}.ratio", 0, 1)
    if "length" in seq:
        check.integer(seq["length"], f"{path}.length", 6)
    if "phase" in seq:
        check.number(seq["phase"], f"{path}.phase", 0, 1, strict=False)
        if seq["phase"] == 1:
            check.error(f"{path}.phase", "must be < 1")


def _check_positive_fields(check, section, path, allowed, integers=()):
    if not check.mapping(section, path, allowed):
        return
    for key, value in section.items():
        if key in integers:
            check.integer(value, f"{path}.{key}", 1)
        elif key in allowed:
            check.number(value, f"{path}.{key}", 0)


def _check_limit(check, section, names):
    allowed = {"massless_comparison", "dilation", "spectrum", "fit", "orbit_conditions"}
    if not check.mapping(section, "limit", allowed):
        return
    if "dilation" in section and check.sequence(section["dilation"], "limit.dilation", 1):
        for i, mu in enumerate(section["dilation"]):
            check.number(mu, f"limit.dilation[{i}]", 0)
    spectrum = section.get("spectrum")
    if spectrum is not None and check.mapping(spectrum, "limit.spectrum", {"function", "times"}):
        if "function" in spectrum:
            _check_name(check, spectrum["function"], "limit.spectrum.function", names)
        if check.sequence(spectrum.get("times"), "limit.spectrum.times", 3):
            for i, time in enumerate(spectrum["times"]):
                check.number(time, f"limit.spectrum.times[{i}]")
    fit = section.get("fit")
    allowed = {"function", "lambdas", "corrections"}
    if fit is not None and check.mapping(fit, "limit.fit", allowed):
        _check_name(check, fit.get("function"), "limit.fit.function", names)
        if "corrections" in fit:
            check.integer(fit["corrections"], "limit.fit.corrections", 0)
        if check.sequence(fit.get("lambdas"), "limit.fit.lambdas", 4):
            for i, lam in enumerate(fit["lambdas"]):
                check.number(lam, f"limit.fit.lambdas[{i}]", 0)
    conditions = section.get("orbit_conditions")
    if conditions is not None:
        path = "limit.orbit_conditions"
        if check.mapping(conditions, path, {"function", "lambdas", "displacements", "halvings"}):
            _check_name(check, conditions.get("function"), f"{path}.function", names)
            if check.sequence(conditions.get("lambdas"), f"{path}.lambdas", 1):
                for i, lam in enumerate(conditions["lambdas"]):
                    check.number(lam, f"{path}.lambdas[{i}]", 0)
            check.sequence(conditions.get("displacements"), f"{path}.displacements", 1)
            if "halvings" in conditions:
                check.integer(conditions["halvings"], f"{path}.halvings", 1)


def _check_emt(check, section, names, dim):
    allowed = {"functions", "lambdas", "axes", "quantile", "radius_lambdas"}
    if not check.mapping(section, "emt", allowed):
        return
    if check.sequence(section.get("functions"), "emt.functions", 1):
        for i, name in enumerate(section["functions"]):
            _check_name(check, name, f"emt.functions[{i}]", names)
    for key in ("lambdas", "radius_lambdas"):
        if key in section and check.sequence(section[key], f"emt.{key}", 1):
            for i, lam in enumerate(section[key]):
                check.number(lam, f"emt.{key}[{i}]", 0)
    if "axes" in section and check.sequence(section["axes"], "emt.axes", 1):
        for i, axis in enumerate(section["axes"]):
            if check.integer(axis, f"emt.axes[{i}]", 0) and dim is not None and axis >= dim:
                check.error(f"emt.axes[{i}]", f"must be < {dim}")
    if "quantile" in section:
        check.number(section["quantile"], "emt.quantile", 0, 1)


def _check_stability(check, section):
    allowed = {
        "spacetime",
        "chart",
        "probes",
        "translation",
        "boost_rapidity",
        "log_modulation",
        "sequence",
    }
    if not check.mapping(section, "stability", allowed):
        return
    dim = None
    spacetime = section.get("spacetime", {})
    if check.mapping(spacetime, "stability.spacetime", {"kind", "dim", "hubble", "exponent"}):
        if spacetime.get("kind", "minkowski") not in SPACETIME_KINDS:
            check.error("stability.spacetime.kind", f"must be one of {list(SPACETIME_KINDS)}")
        dim = spacetime.get("dim", 4)
        if dim not in (3, 4):
            check.error("stability.spacetime.dim", "must be 3 or 4")
            dim = None
        if "hubble" in spacetime:
            check.number(spacetime["hubble"], "stability.spacetime.hubble", 0)
        if "exponent" in spacetime:
            check.number(spacetime["exponent"], "stability.spacetime.exponent")
    chart = section.get("chart", {})
    if check.mapping(chart, "stability.chart", {"base_point", "max_radius", "rtol", "atol"}):
        if "base_point" in chart:
            check.vector(chart["base_point"], "stability.chart.base_point", dim)
        for key in ("max_radius", "rtol", "atol"):
            if key in chart:
                check.number(chart[key], f"stability.chart.{key}", 0)
    if check.sequence(section.get("probes"), "stability.probes", 1):
        for i, pair in enumerate(section["probes"]):
            path = f"stability.probes[{i}]"
            if not check.sequence(pair, path) or len(pair) != 2:
                check.error(path, "must be a pair of points")
                continue
            check.vector(pair[0], f"{path}[0]", dim)
            check.vector(pair[1], f"{path}[1]", dim)
    if "translation" in section:
        check.vector(section["translation"], "stability.translation", dim)
    if "boost_rapidity" in section:
        check.number(section["boost_rapidity"], "stability.boost_rapidity")
    if "log_modulation" in section:
        check.number(section["log_modulation"], "stability.log_modulation", 0, 1, strict=False)
    if "sequence" in section:
        _check_sequence(check, section["sequence"], "stability.sequence")


####################################
# ENTRY POINTS                     #
####################################


def validate(config, command=None):
    """Validate a configuration mapping for ``command``.

    :returns: ``(is_valid, report)`` where ``report`` holds the list of
        ``(path, message)`` errors under ``errors`` and its human-readable
        rendering under ``report``.
    """
    check = _Checker()
    if not check.mapping(config, "<root>", TOP_LEVEL_KEYS):
        return _finish(check)
    declared = config.get("command")
    if declared is not None and declared not in COMMANDS:
        check.error("command", f"must be one of {list(COMMANDS)}")
    command = command or declared
    if command is None:
        check.error("command", "no command given")
    elif declared is not None and declared != command:
        check.error("command", f"config is for {declared!r}, not {command!r}")
    for section in REQUIRED_SECTIONS.get(command, ()):
        if section not in config:
            check.error(section, "missing")

    if "seed" in config:
        check.integer(config["seed"], "seed", 0)
    if "threads" in config:
        check.integer(config["threads"], "threads", 1)
    dim = _check_model(check, config["model"]) if "model" in config else None
    names = set()
    if "functions" in config:
        names = _check_functions(check, config["functions"], dim)
    if "renorm" in config:
        _check_renorm(check, config["renorm"], names)
    if "probes" in config:
        _check_probes(check, config["probes"], names)
    if "sequences" in config and check.sequence(config["sequences"], "sequences", 1):
        for i, seq in enumerate(config["sequences"]):
            _check_sequence(check, seq, f"sequences[{i}]")
    if "tolerances" in config:
        _check_positive_fields(check, config["tolerances"], "tolerances", TOLERANCE_KEYS)
    if "quadrature" in config:
        _check_positive_fields(
            check,
            config["quadrature"],
            "quadrature",
            QUADRATURE_KEYS,
            integers=(
                "radial_nodes",
                "planar_nodes",
                "lebedev_order",
                "max_refinements",
                "adaptive_limit",
            ),
        )
        if config["quadrature"].get("lebedev_order", 35) not in quadrature.LEBEDEV_ORDERS:
            check.error("quadrature.lebedev_order", "unsupported Lebedev order")
    if "limit" in config:
        _check_limit(check, config["limit"], names)
    if "emt" in config:
        _check_emt(check, config["emt"], names, dim)
    if "stability" in config:
        _check_stability(check, config["stability"])
    if "output" in config and check.mapping(config["output"], "output", {"dir", "prefix"}):
        for key in ("dir", "prefix"):
            if key in config["output"] and not isinstance(config["output"][key], str):
                check.error(f"output.{key}", "must be a string")
    return _finish(check)


def _finish(check):
    report = {"errors": list(check.errors)}
    report["report"] = report_string(report)
    return not check.errors, report


def report_string(report):
    """Return a human-readable rendering of the validation errors."""
    if not report["errors"]:
        return "Configuration is valid."
    lines = [f"Configuration Error(s): {len(report['errors'])}"]
    for index, (path, message) in enumerate(report["errors"], start=1):
        lines.append(f"{index}. {path}: {message}")
    return "\n".join(lines)
