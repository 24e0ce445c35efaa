from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

import sentry_sdk

from config.app_config import AppConfig
from multiflow.fractional_flow import check_feasible, max_multiflow
from multiflow.instance_io.generators import gen_c4_2k2_overline, gen_fuzz, gen_gk
from multiflow.instance_io.model import Flow, Instance
from multiflow.instance_io.planemf_format import (
    InstanceSyntaxError,
    flow_from_json,
    parse,
    rational_to_json,
    serialize,
)
from multiflow.laminar import laminarize
from multiflow.multicut import verify_multicut, wgmv_multicut
from multiflow.oracle import (
    exact_max_half_integer_flow,
    exact_max_integer_flow,
    exact_min_multicut,
)
from multiflow.rounding.half_integer import half_integer_round, plus_one_round
from multiflow.rounding.integer import integer_round
from utils.logging_utils import create_log_message
from utils.report_utils import (
    build_report,
    dump,
    flow_checks,
    multicut_checks,
    report_passed,
    run_pipeline,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SOLVE_MODES = ("frac", "half", "int", "plus-one")
ORACLE_TARGETS = ("mincut", "int", "half")


class UsageError(Exception):
    """Raised when the command line cannot be parsed."""


class ArgumentParser(argparse.ArgumentParser):
    """An argparse parser that raises `UsageError` instead of exiting."""

    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="planemf",
        description="Multiflows and multicuts in planar supply graphs.",
    )
    parser.add_argument(
        "--config_file",
        help=(
            "Path to the configuration file. If no path is provided, will try to "
            "load from `planemf.ini` and environmental variables."
        ),
    )
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    gen = commands.add_parser("gen", help="write a generated instance")
    families = gen.add_subparsers(dest="family")
    families.required = True
    gk = families.add_parser("gk", help="the ladder family G_k")
    gk.add_argument("--k", type=int, required=True)
    c4 = families.add_parser("c4", help="the (C4, 2K2) gadget after the overline transform")
    fuzz = families.add_parser("fuzz", help="a random grid instance")
    fuzz.add_argument("--seed", type=int, required=True)
    for family in (gk, c4, fuzz):
        family.add_argument("-o", "--output", help="write here instead of stdout")

    def with_instance(name: str, help_text: str) -> ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("file", help="planemf instance file")
        sub.add_argument("--json", action="store_true", help="emit the JSON report")
        return sub

    solve = with_instance("solve", "run one rounding pipeline stage")
    solve.add_argument("--mode", choices=SOLVE_MODES, required=True)
    with_instance("multicut", "primal-dual multicut with its certifying flow")
    oracle = with_instance("oracle", "exhaustive ground truth for small instances")
    oracle.add_argument("--what", choices=ORACLE_TARGETS, required=True)
    verify = with_instance("verify", "check a flow file against an instance")
    verify.add_argument("--flow", required=True, help="JSON flow or report file")
    verify.add_argument(
        "--slack", type=int, default=0, help="allowed overload per edge"
    )
    with_instance("report", "full pipeline with values, ratios and checks")
    commands.add_parser("config", help="print the effective configuration")
    return parser


def read_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as file:
        return parse(file.read())


def _finish(report: dict[str, Any], as_json: bool) -> tuple[int, str]:
    code = EXIT_OK if report_passed(report) else EXIT_FAILURE
    return code, dump(report, as_json)


def command_gen(args: argparse.Namespace, app_config: AppConfig) -> tuple[int, str]:
    if args.family == "gk":
        inst = gen_gk(args.k)
    elif args.family == "c4":
        inst = gen_c4_2k2_overline()
    else:
        settings = app_config.fuzz_settings
        inst = gen_fuzz(args.seed, **settings.model_dump())
    text = serialize(inst)
    if not args.output:
        return EXIT_OK, text.rstrip("\n")
    with open(args.output, "w", encoding="utf-8") as file:
        file.write(text)
    logging.info(
        create_log_message("Wrote instance", family=args.family, file=args.output)
    )
    return EXIT_OK, ""


def command_solve(args: argparse.Namespace, app_config: AppConfig) -> tuple[int, str]:
    inst = read_instance(args.file)
    solver = app_config.solver_settings
    fractional = max_multiflow(inst, settings=solver)
    frac = fractional.value
    flow: Flow
    if args.mode == "frac":
        flow, checks = fractional, flow_checks(inst, fractional)
    else:
        laminar = laminarize(inst, fractional, solver)
        if args.mode == "plus-one":
            flow = plus_one_round(inst, laminar, solver)
            checks = flow_checks(
                inst,
                flow,
                slack=1,
                integral=flow.is_integer(),
                **{"value>=fractional": flow.value >= frac},
            )
        else:
            half = half_integer_round(inst, laminar, solver)
            if args.mode == "half":
                flow = half
                checks = flow_checks(
                    inst,
                    half,
                    half_integral=half.is_half_integer(),
                    **{"value>=fractional/2": 2 * half.value >= frac},
                )
            else:
                flow = integer_round(inst, half, solver)
                checks = flow_checks(
                    inst,
                    flow,
                    integral=flow.is_integer(),
                    **{"value>=half/2": 2 * flow.value >= half.value},
                )
    report = build_report(
        args.file,
        args.mode,
        flow.value,
        flow,
        checks=checks,
        fractional=rational_to_json(frac),
    )
    return _finish(report, args.json)


def command_multicut(
    args: argparse.Namespace, app_config: AppConfig
) -> tuple[int, str]:
    inst = read_instance(args.file)
    run = wgmv_multicut(inst, app_config.solver_settings)
    report = build_report(
        args.file,
        "multicut",
        run.capacity,
        run.flow,
        run.multicut,
        multicut_checks(inst, run),
        dual_value=rational_to_json(run.dual_value),
    )
    return _finish(report, args.json)


def command_oracle(args: argparse.Namespace, app_config: AppConfig) -> tuple[int, str]:
    inst = read_instance(args.file)
    settings = app_config.oracle_settings
    value: Fraction | int
    if args.what == "mincut":
        value, multicut = exact_min_multicut(inst, settings)
        report = build_report(
            args.file,
            "oracle-mincut",
            value,
            multicut=multicut,
            checks={"separates_demands": verify_multicut(inst, multicut)},
        )
    else:
        if args.what == "int":
            value, flow = exact_max_integer_flow(inst, settings=settings)
        else:
            value, flow = exact_max_half_integer_flow(inst, settings=settings)
        report = build_report(
            args.file,
            f"oracle-{args.what}",
            value,
            flow,
            checks=flow_checks(inst, flow),
        )
    return _finish(report, args.json)


def command_verify(
    args: argparse.Namespace, app_config: AppConfig  # pylint: disable=unused-argument
) -> tuple[int, str]:
    inst = read_instance(args.file)
    with open(args.flow, encoding="utf-8") as file:
        data = json.load(file)
    if isinstance(data, dict):
        data = data.get("paths", [])
    flow = flow_from_json(inst, data)
    feasibility = check_feasible(inst, flow, slack=args.slack)
    report = build_report(
        args.file,
        "verify",
        flow.value,
        flow,
        checks={"feasible": feasibility.feasible},
        violations=list(feasibility.violations),
        max_loaded=list(feasibility.max_loaded),
    )
    logging.debug(
        create_log_message(
            "Verified flow",
            file=args.flow,
            feasible=feasibility.feasible,
            slack=args.slack,
        )
    )
    return _finish(report, args.json)


def command_report(args: argparse.Namespace, app_config: AppConfig) -> tuple[int, str]:
    inst = read_instance(args.file)
    result = run_pipeline(inst, app_config)
    ratios = {
        name: None if value is None else rational_to_json(value)
        for name, value in result.ratios().items()
    }
    report = build_report(
        args.file,
        "report",
        result.fractional.value,
        multicut=result.multicut.multicut,
        checks=result.checks(inst),
        values=result.values(),
        ratios=ratios,
        skipped=result.skipped,
    )
    return _finish(report, args.json)


def command_config(
    args: argparse.Namespace, app_config: AppConfig  # pylint: disable=unused-argument
) -> tuple[int, str]:
    return EXIT_OK, app_config.get_readable_config()


COMMANDS = {
    "gen": command_gen,
    "solve": command_solve,
    "multicut": command_multicut,
    "oracle": command_oracle,
    "verify": command_verify,
    "report": command_report,
    "config": command_config,
}


def run(
    argv: Sequence[str], configure_logging: bool = False
) -> tuple[int, str]:
    """
    Executes one command line.

    Args:
        argv (Sequence[str]): Arguments without the program name.
        configure_logging (bool): Install the root handler from `LoggingSettings`.

    Returns:
        tuple[int, str]: Exit code (0 success, 1 failure, 2 usage error) and
            the text to print.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as exc:
        return EXIT_USAGE, str(exc)
    except SystemExit as exc:
        # --help
        return int(exc.code or 0), ""

    app_config = AppConfig()
    try:
        app_config.load_config(args.config_file)
    except (OSError, ValueError) as exc:
        return EXIT_FAILURE, f"error: {exc}"
    if configure_logging:
        logging.basicConfig(
            level=app_config.log_level, format=app_config.logging_settings.format
        )

    try:
        return COMMANDS[args.command](args, app_config)
    except InstanceSyntaxError as exc:
        return EXIT_FAILURE, f"{args.file}:{exc.lineno}: {exc.detail}"
    except OSError as exc:
        return EXIT_FAILURE, f"error: {exc}"
    except (ValueError, SyntaxError, RuntimeError, ArithmeticError, KeyError) as exc:
        logging.error(
            create_log_message(
                "Command failed", command=args.command, error=type(exc).__name__
            )
        )
        return EXIT_FAILURE, f"error: {type(exc).__name__}: {exc}"


def main() -> None:
    sentry_sdk.init()
    code, output = run(sys.argv[1:], configure_logging=True)
    if output:
        print(output, file=sys.stdout if code == EXIT_OK else sys.stderr)
    sys.exit(code)


if __name__ == "__main__":
    main()
