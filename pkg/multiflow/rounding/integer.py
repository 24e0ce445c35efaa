from __future__ import annotations

import logging

from config.settings.solver_settings import SolverSettings
from multiflow.fractional_flow import check_feasible
from multiflow.instance_io.model import Flow, Instance
from multiflow.rounding.half_integer import RoundingError, refine_halves
from multiflow.rounding.stable_set import TargetUnreachable, stable_set
from multiflow.rounding.subdivision import subdivided_integer_round
from utils.logging_utils import create_log_message


def integer_round(
    inst: Instance, hf: Flow, settings: SolverSettings | None = None
) -> Flow:
    """
    A feasible integral flow of at least half the value of a half-integral one.

    The flow is laminarized and split into its integer part and shores of
    value 1/2. Shores that share a unit slot of some edge conflict; a stable
    set of the conflict graph holds at least a quarter of them and is routed
    at value 1. If the slot layout yields a conflict graph without such a
    stable set, the explicit unit subdivision is used instead.

    Args:
        inst (Instance): The instance.
        hf (Flow): A feasible half-integral flow.
        settings (SolverSettings | None): Solver switches.

    Returns:
        Flow: The integral flow; `hf` itself when it is already integral.

    Raises:
        ValueError: If `hf` is not half-integral.
        TargetUnreachable: If the subdivision fallback fails as well.
        RoundingError: If the result is infeasible or too small.
    """
    if hf.is_integer():
        return hf
    if not hf.is_half_integer():
        raise ValueError("integer rounding needs a half-integral flow")
    settings = settings or SolverSettings()

    integer_part, split = refine_halves(inst, hf)
    try:
        chosen = stable_set(split.intersection)
    except TargetUnreachable as exc:
        logging.warning(
            create_log_message(
                "Slot layout has no large stable set, subdividing", reason=str(exc)
            )
        )
        result = subdivided_integer_round(inst, hf, settings)
    else:
        result = integer_part + Flow.from_items(
            (split.paths[position], 1) for position in sorted(chosen)
        )

    report = check_feasible(inst, result)
    if not report.feasible:
        raise RoundingError(f"integral rounding overloads edge {report.witness}")
    if not result.is_integer() or 2 * result.value < hf.value:
        raise RoundingError(
            f"integral rounding returned {result.value} for input {hf.value}"
        )
    logging.info(
        create_log_message(
            "Rounded to integral flow",
            input=hf.value,
            output=result.value,
            halves=len(split),
        )
    )
    return result
