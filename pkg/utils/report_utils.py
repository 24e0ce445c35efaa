from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from config.app_config import AppConfig
from multiflow.fractional_flow import check_feasible, enumerate_paths, max_multiflow
from multiflow.instance_io.model import Flow, Instance
from multiflow.instance_io.planemf_format import flow_to_json, rational_to_json
from multiflow.laminar import laminarize
from multiflow.multicut import MulticutRun, verify_multicut, wgmv_multicut
from multiflow.oracle import (
    TooLarge,
    exact_max_half_integer_flow,
    exact_max_integer_flow,
    exact_min_multicut,
)
from multiflow.rounding.half_integer import half_integer_round, plus_one_round
from multiflow.rounding.integer import integer_round
from utils.logging_utils import create_log_message, format_fraction

MAX_RATIO = Fraction(2)


def ratio(numerator: Fraction | int, denominator: Fraction | int) -> Optional[Fraction]:
    """`numerator / denominator`, or None when the denominator is zero."""
    if not denominator:
        return None
    return Fraction(numerator) / Fraction(denominator)


def build_report(
    instance: str,
    mode: str,
    value: Fraction | int,
    flow: Flow | None = None,
    multicut: Iterable[int] = (),
    checks: Mapping[str, bool] | None = None,
    **extra: Any,
) -> dict[str, Any]:
    """
    Assembles the JSON report shared by every CLI command.

    Rationals are `{num, den}` objects; paths and multicut edges are sorted.
    """
    report: dict[str, Any] = {
        "instance": instance,
        "mode": mode,
        "value": rational_to_json(value),
        "paths": flow_to_json(flow) if flow is not None else [],
        "multicut": sorted(multicut),
        "checks": dict(checks or {}),
    }
    report.update(extra)
    return report


def report_passed(report: Mapping[str, Any]) -> bool:
    return all(report["checks"].values())


def _render_value(value: Any) -> str:
    if isinstance(value, dict) and set(value) == {"num", "den"}:
        return format_fraction(Fraction(value["num"], value["den"]))
    if value is None:
        return "n/a"
    return str(value)


def render_text(report: Mapping[str, Any]) -> str:
    """Human-readable form of a report."""
    lines = [
        f"instance: {report['instance']}",
        f"mode: {report['mode']}",
        f"value: {_render_value(report['value'])}",
    ]
    for path in report["paths"]:
        vertices = "-".join(str(vertex) for vertex in path["vertices"])
        lines.append(
            f"  demand {path['demand']}: {vertices} = {_render_value(path['value'])}"
        )
    if report["multicut"]:
        lines.append("multicut: " + " ".join(str(edge) for edge in report["multicut"]))
    for section in ("values", "ratios"):
        if section in report:
            lines.append(f"{section}:")
            for name, value in report[section].items():
                lines.append(f"  {name:<24} {_render_value(value)}")
    if report["checks"]:
        lines.append("checks:")
        for name, passed in report["checks"].items():
            lines.append(f"  {name:<24} {'ok' if passed else 'FAILED'}")
    return "\n".join(lines)


def dump(report: Mapping[str, Any], as_json: bool) -> str:
    if as_json:
        return json.dumps(report, ensure_ascii=False, indent=2)
    return render_text(report)


def flow_checks(
    inst: Instance, flow: Flow, slack: int = 0, **bounds: bool
) -> dict[str, bool]:
    """Feasibility of `flow` plus any named extra conditions."""
    return {"feasible": check_feasible(inst, flow, slack=slack).feasible, **bounds}


def multicut_checks(inst: Instance, run: MulticutRun) -> dict[str, bool]:
    return {
        "separates_demands": verify_multicut(inst, run.multicut),
        "flow_feasible": check_feasible(inst, run.flow).feasible,
        "flow_matches_dual": run.flow.value == run.dual_value,
        "within_factor_two": run.capacity <= 2 * run.flow.value,
    }


@dataclass
class PipelineResult:
    """Every value the full pipeline produces for one instance."""

    fractional: Flow
    half_integer: Flow
    integer: Flow
    plus_one: Flow
    multicut: MulticutRun
    oracle_min_multicut: Optional[int] = None
    oracle_integer: Optional[int] = None
    oracle_half_integer: Optional[Fraction] = None
    skipped: list[str] = field(default_factory=list)

    def values(self) -> dict[str, Any]:
        def encode(value: Optional[Fraction | int]) -> Optional[dict[str, int]]:
            return None if value is None else rational_to_json(value)

        return {
            "fractional": encode(self.fractional.value),
            "half_integer": encode(self.half_integer.value),
            "integer": encode(self.integer.value),
            "plus_one": encode(self.plus_one.value),
            "multicut": encode(self.multicut.capacity),
            "multicut_flow": encode(self.multicut.flow.value),
            "oracle_min_multicut": encode(self.oracle_min_multicut),
            "oracle_integer": encode(self.oracle_integer),
            "oracle_half_integer": encode(self.oracle_half_integer),
        }

    def ratios(self) -> dict[str, Optional[Fraction]]:
        return {
            "multicut/fractional": ratio(self.multicut.capacity, self.fractional.value),
            "fractional/half": ratio(self.fractional.value, self.half_integer.value),
            "half/integer": ratio(self.half_integer.value, self.integer.value),
            "oracle_mincut/fractional": (
                None
                if self.oracle_min_multicut is None
                else ratio(self.oracle_min_multicut, self.fractional.value)
            ),
        }

    def checks(self, inst: Instance) -> dict[str, bool]:
        frac = self.fractional.value
        run = self.multicut
        checks = {
            "multicut_flow<=fractional": run.flow.value <= frac,
            "fractional<=multicut": frac <= run.capacity,
            "multicut<=2*multicut_flow": run.capacity <= 2 * run.flow.value,
            "multicut_separates": verify_multicut(inst, run.multicut),
            "half_feasible": check_feasible(inst, self.half_integer).feasible,
            "half_is_half_integral": self.half_integer.is_half_integer(),
            "half>=fractional/2": 2 * self.half_integer.value >= frac,
            "integer_feasible": check_feasible(inst, self.integer).feasible,
            "integer_is_integral": self.integer.is_integer(),
            "integer>=half/2": 2 * self.integer.value >= self.half_integer.value,
            "plus_one_within_c+1": check_feasible(inst, self.plus_one, 1).feasible,
            "plus_one>=fractional": self.plus_one.value >= frac,
        }
        for name, value in self.ratios().items():
            if value is not None and name != "oracle_mincut/fractional":
                checks[f"{name}<=2"] = value <= MAX_RATIO
        chain = [
            self.oracle_integer,
            self.oracle_half_integer,
            frac,
            self.oracle_min_multicut,
        ]
        known = [Fraction(value) for value in chain if value is not None]
        if len(known) > 1:
            checks["oracle_chain_ordered"] = all(
                low <= high for low, high in zip(known, known[1:])
            )
        return checks


def run_pipeline(inst: Instance, app_config: AppConfig) -> PipelineResult:
    """
    Runs every stage on one instance, plus the oracles that fit their limits.

    The integral flow is rounded from the half-integral output of the
    fractional optimum.
    """
    solver = app_config.solver_settings
    paths = enumerate_paths(inst, settings=solver)
    fractional = max_multiflow(inst, paths, solver)
    laminar = laminarize(inst, fractional, solver)
    half = half_integer_round(inst, laminar, solver)
    result = PipelineResult(
        fractional=fractional,
        half_integer=half,
        integer=integer_round(inst, half, solver),
        plus_one=plus_one_round(inst, laminar, solver),
        multicut=wgmv_multicut(inst, solver),
    )

    oracle = app_config.oracle_settings
    try:
        result.oracle_min_multicut, _ = exact_min_multicut(inst, oracle)
    except TooLarge as exc:
        result.skipped.append(f"oracle_min_multicut: {exc}")
    try:
        result.oracle_integer, _ = exact_max_integer_flow(inst, paths, oracle)
        result.oracle_half_integer, _ = exact_max_half_integer_flow(inst, paths, oracle)
    except TooLarge as exc:
        result.skipped.append(f"oracle flows: {exc}")

    for reason in result.skipped:
        logging.info(create_log_message("Oracle skipped", reason=reason))
    return result
