"""Command-line interface.

Usage::

    scalelab limit|classify|emt|stability --config PATH [--out DIR]
             [--threads N] [--verbose]

Exit codes: 0 success, 1 computation error, 2 inconclusive or failed
check, 64 invalid configuration or usage.
"""

import argparse
import logging
import os
import sys

import numpy as np

from . import config as config_module
from . import curved
from . import exceptions
from . import reports
from . import rgflow
from . import scalinglimit

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2
EXIT_CONFIG = 64

ESTIMATE_COLUMNS = ["probe", "sequence", "lambda", "re", "im", "err"]
IDENTITY_COLUMNS = ["function", "lambda", "axis", "lhs", "rhs", "rel_diff"]
RADIUS_COLUMNS = ["function", "lambda", "radius", "lambda_radius"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    from . import __version__

    parser = _Parser(
        prog="scalelab",
        description="Scaling limits of free and generalized free quantum fields.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("limit", "scaling limits of two-point functions along lambda-sequences"),
        ("classify", "classical / quantum / degenerate classification"),
        ("emt", "energy-momentum transfer diagnostics"),
        ("stability", "local stability at a point of a curved spacetime"),
    ):
        command = commands.add_parser(name, help=help_text)
        command.add_argument("--config", required=True, metavar="PATH")
        command.add_argument("--out", default=None, metavar="DIR")
        command.add_argument("--threads", type=int, default=None, metavar="N")
        command.add_argument("--verbose", action="store_true")
    return parser


def _path(out, run, suffix):
    return os.path.join(out, f"{run.prefix}_{suffix}")


def _estimate_rows(probe, sequence, estimate):
    return [
        {
            "probe": probe,
            "sequence": sequence,
            "lambda": lam,
            "re": value.real,
            "im": value.imag,
            "err": error,
        }
        for lam, value, error in zip(estimate.lambdas, estimate.values, estimate.errors)
    ]


####################################
# COMMANDS                         #
####################################


def cmd_limit(run, out):
    rows = []
    estimates = []
    for index, (orbit_f, orbit_g) in enumerate(run.probes):
        for position, seq in enumerate(run.sequences):
            estimate = scalinglimit.limit_correlator(
                run.model, orbit_f, orbit_g, seq, run.tolerances, run.settings, run.threads
            )
            rows.extend(_estimate_rows(f"p{index}", f"s{position}", estimate))
            estimates.append(
                {"probe": f"p{index}", "sequence": f"s{position}", **estimate.to_record()}
            )
    converged = all(item["converged"] for item in estimates)
    payload = {
        "command": "limit",
        "model": run.model.to_record(),
        "estimates": estimates,
        "converged": converged,
    }
    payload.update(_limit_extras(run, estimates))
    reports.write_csv(_path(out, run, "estimates.csv"), rows, ESTIMATE_COLUMNS, run.sha256)
    reports.write_json(_path(out, run, "limit.json"), payload, run.sha256)
    return EXIT_OK if converged else EXIT_INCONCLUSIVE


def _limit_extras(run, estimates):
    section = run.section("limit")
    extras = {}
    first = run.sequences[0]
    if section.get("massless_comparison"):
        limits = [item["limit"] for item in estimates if item["sequence"] == "s0"]
        comparison = scalinglimit.compare_to_massless(
            limits, run.probes, run.settings, run.threads
        )
        extras["massless"] = comparison._asdict()
    if section.get("dilation"):
        orbit_f, orbit_g = run.probes[0]
        extras["dilation"] = scalinglimit.dilation_check(
            run.model,
            orbit_f,
            orbit_g,
            first,
            section["dilation"],
            run.tolerances,
            run.settings,
            run.threads,
        )
    if section.get("spectrum"):
        spectrum = section["spectrum"]
        name = spectrum.get("function", run.raw["probes"][0][0])
        times = [float(time) for time in spectrum["times"]]
        family = scalinglimit.translation_family_limits(
            run.model, run.orbit(name), first, times, run.tolerances, run.settings, run.threads
        )
        extras["spectrum"] = scalinglimit.spectrum_condition_check(
            times, family, run.tolerances.stab
        )
        extras["spectrum_reflected"] = scalinglimit.spectrum_condition_check(
            times,
            scalinglimit.time_reflected([estimate.limit for estimate in family]),
            run.tolerances.stab,
        )
    if section.get("fit"):
        fit = rgflow.fit_renorm_exponent(
            run.model,
            run.functions[section["fit"]["function"]],
            section["fit"]["lambdas"],
            run.settings,
            run.threads,
            section["fit"].get("corrections", 1),
        )
        extras["renorm_fit"] = fit._asdict()
    if section.get("orbit_conditions"):
        conditions = section["orbit_conditions"]
        extras["orbit_conditions"] = rgflow.orbit_condition_report(
            run.model,
            run.orbit(conditions["function"]),
            conditions["lambdas"],
            conditions["displacements"],
            conditions.get("halvings", 4),
            run.settings,
            run.threads,
        )
    return extras


def cmd_classify(run, out):
    verdict = scalinglimit.classify(
        run.model, run.probes, run.sequences, run.tolerances, run.settings, run.threads
    )
    payload = {"command": "classify", "model": run.model.to_record(), **verdict.to_record()}
    reports.write_csv(
        _path(out, run, "evidence.csv"), verdict.rows(), ESTIMATE_COLUMNS, run.sha256
    )
    reports.write_json(_path(out, run, "verdict.json"), payload, run.sha256)
    return EXIT_OK


def cmd_emt(run, out):
    section = run.section("emt")
    lambdas = [float(lam) for lam in section.get("lambdas", [1.0, 0.1, 0.01])]
    radius_lambdas = [float(lam) for lam in section.get("radius_lambdas", lambdas)]
    axes = section.get("axes", list(range(run.model.dim)))
    quantile = float(section.get("quantile", 0.9))
    identity_rows = []
    radius_rows = []
    for name in section["functions"]:
        orbit = run.orbit(name)
        for lam in lambdas:
            sides = [
                rgflow.emt_identity(run.model, orbit, lam, axis, run.settings) for axis in axes
            ]
            differences = rgflow.emt_relative_differences(sides, run.settings.rtol)
            for axis, side, difference in zip(axes, sides, differences):
                identity_rows.append(
                    {
                        "function": name,
                        "lambda": lam,
                        "axis": axis,
                        "lhs": side.lhs,
                        "rhs": side.rhs,
                        "rel_diff": difference,
                    }
                )
        for lam in radius_lambdas:
            radius = rgflow.emt_radius(run.model, orbit, lam, quantile, run.settings)
            radius_rows.append(
                {
                    "function": name,
                    "lambda": lam,
                    "radius": radius,
                    "lambda_radius": lam * radius,
                }
            )
    scaled = np.array([row["lambda_radius"] for row in radius_rows])
    payload = {
        "command": "emt",
        "model": run.model.to_record(),
        "quantile": quantile,
        "max_rel_diff": max(row["rel_diff"] for row in identity_rows),
        "lambda_radius_spread": float(np.max(scaled) / np.min(scaled) - 1.0),
    }
    reports.write_csv(
        _path(out, run, "emt_identity.csv"), identity_rows, IDENTITY_COLUMNS, run.sha256
    )
    reports.write_csv(_path(out, run, "emt_radius.csv"), radius_rows, RADIUS_COLUMNS, run.sha256)
    reports.write_json(_path(out, run, "emt.json"), payload, run.sha256)
    return EXIT_OK


def cmd_stability(run, out):
    section = run.section("stability")
    chart = config_module.build_chart(section)
    state = curved.CurvedTwoPoint(chart.spacetime, float(section.get("log_modulation", 0.0)))
    seq = curved.DEFAULT_SEQUENCE
    if "sequence" in section:
        seq = config_module.build_sequence(section["sequence"])
    report = curved.local_stability_report(
        state,
        chart,
        section["probes"],
        seq,
        section.get("translation"),
        float(section.get("boost_rapidity", 0.3)),
        run.tolerances,
        run.threads,
    )
    reports.write_json(
        _path(out, run, "stability.json"), {"command": "stability", **report}, run.sha256
    )
    return EXIT_OK if report["verdict"] == curved.STABLE else EXIT_INCONCLUSIVE


COMMANDS = {
    "limit": cmd_limit,
    "classify": cmd_classify,
    "emt": cmd_emt,
    "stability": cmd_stability,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        raw = config_module.load_config(args.config)
        run = config_module.build(raw, args.command, args.threads)
    except exceptions.ConfigError as err:
        if err.line is not None:
            print(f"{args.config}:{err.line}: {err}", file=sys.stderr)
        else:
            print(err, file=sys.stderr)
        return EXIT_CONFIG
    out = config_module.output_dir(raw, args.out)
    try:
        return COMMANDS[args.command](run, out)
    except exceptions.ScaleLabError as err:
        LOGGER.error("%s failed: %s", args.command, err)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
