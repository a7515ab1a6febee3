"""Entry point choosing between branch-and-bound, the oracle, or both."""

import math
from typing import Optional

from gep_planner.common.exceptions import DataValidationError, ModelingError
from gep_planner.common.logging_config import setup_logger
from gep_planner.planner.bnb import solve_bnb
from gep_planner.planner.milp import build_milp
from gep_planner.planner.oracle import enumerate_oracle
from gep_planner.planner.plan import CandidateSpace, candidate_space
from gep_planner.planner.result import PlannerResult, enforce_big_m
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.system.model import SystemModel

# Configure logging
log = setup_logger(__name__)

MODES = ("oracle", "milp", "both")

# relative objective agreement required between the two modes
AGREEMENT_RTOL = 1e-6


def compare_results(milp: PlannerResult, oracle: PlannerResult) -> dict:
    """Objective and plan agreement of a branch-and-bound and an oracle run."""
    scale = max(1.0, abs(oracle.objective))
    difference = abs(milp.objective - oracle.objective) / scale
    return {
        "milp_objective_usd": milp.objective,
        "oracle_objective_usd": oracle.objective,
        "relative_difference": difference,
        "same_plan": milp.plan.sort_key() == oracle.plan.sort_key(),
        "agree": difference <= AGREEMENT_RTOL
        and milp.plan.sort_key() == oracle.plan.sort_key(),
    }


def plan_expansion(
    model: SystemModel,
    scenarios: ScenarioSet,
    mode: str = "oracle",
    gap: Optional[float] = None,
    time_limit: Optional[float] = None,
    space: Optional[CandidateSpace] = None,
) -> PlannerResult:
    """Find the profit-maximizing investment plan.

    Args:
        mode: "milp" solves the single-level MILP by branch-and-bound, "oracle"
            enumerates fixed-plan LPs, "both" runs the two and cross-checks them.

    Raises:
        DataValidationError: On an unknown mode.
        ModelingError: If "both" runs disagree on a run solved to optimality.
        BigMBoundError: If `strict_big_m` is set and a policy bound is active.
    """
    if mode not in MODES:
        raise DataValidationError(f"unknown planning mode {mode!r}, expected {MODES}")
    space = space or candidate_space(model, scenarios)
    log.info(
        f"Planning with {len(space.candidates)} candidates, {space.n_binaries()} "
        f"binaries and {len(scenarios)} scenarios in {mode} mode"
    )

    if mode == "oracle":
        return enforce_big_m(enumerate_oracle(model, scenarios, space), model.config)

    milp_result = solve_bnb(build_milp(model, scenarios, space), gap, time_limit)
    if mode == "milp":
        return enforce_big_m(milp_result, model.config)

    oracle_result = enumerate_oracle(model, scenarios, space)
    agreement = compare_results(milp_result, oracle_result)
    milp_result.agreement = agreement
    milp_result.plans_evaluated = oracle_result.plans_evaluated
    exact = not milp_result.timed_out and math.isclose(
        milp_result.gap, 0.0, abs_tol=1e-9
    )
    if not agreement["agree"]:
        message = (
            f"branch-and-bound {milp_result.plan.label(model.config.years)} "
            f"({milp_result.objective:,.2f} $) and oracle "
            f"{oracle_result.plan.label(model.config.years)} "
            f"({oracle_result.objective:,.2f} $) disagree"
        )
        if exact and (gap or model.config.mip_gap) == 0:
            raise ModelingError(message)
        log.warning(message)
    else:
        log.info("Branch-and-bound and oracle agree")
    return enforce_big_m(milp_result, model.config)
