"""
Fixed-plan evaluation and the exhaustive enumeration oracle.

With the investment binaries fixed the single-level model splits into one LP per
(scenario, block, year): primal rows, dual rows and strong duality, maximizing the
block's GENCO profit over the optimal dual face. The oracle prices every plan of
the candidate space this way and keeps the best one.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from gep_planner.common.exceptions import ModelingError
from gep_planner.common.logging_config import setup_logger
from gep_planner.lp.problem import LinExpr, LpBuilder, Sense
from gep_planner.lp.simplex import solve_lp
from gep_planner.market.profit import invest_cost
from gep_planner.planner.block_builder import build_block, linearize_profit_terms
from gep_planner.planner.linearization import BigMHit
from gep_planner.planner.plan import (
    CandidateSpace,
    InvestmentPlan,
    candidate_space,
    enumerate_plans,
)
from gep_planner.planner.result import PlannerResult, prefer, trace_frame
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.system.model import SystemModel

# Configure logging
log = setup_logger(__name__)

BlockKey = tuple[int, int, int, frozenset]


@dataclass(frozen=True)
class BlockOutcome:
    """Optimistic profit of one (scenario, block, year) under a fixed plan."""

    scenario: int
    block: int
    year: int
    profit: float
    raw_profit: float
    primal_cost: float
    dual_objective: float
    big_m_hits: tuple[BigMHit, ...]


def solve_fixed_block(
    model: SystemModel,
    scenarios: ScenarioSet,
    scenario_index: int,
    block: int,
    year: int,
    plan: InvestmentPlan,
) -> BlockOutcome:
    """Maximize one block's GENCO profit subject to primal, dual and strong duality.

    Raises:
        ModelingError: If the block LP is not optimal; a fixed plan always admits
            the cleared market and its duals.
    """
    lp = LpBuilder(f"fixed_s{scenario_index}b{block}y{year}")

    def u_hat(candidate_id: str, bus: int, y: int) -> LinExpr:
        return LinExpr.constant(plan.u_hat(candidate_id, bus, y))

    handle = build_block(
        lp, model, scenarios[scenario_index], scenario_index, block, year, u_hat
    )
    lp.add_objective(linearize_profit_terms(handle))
    program = lp.build(Sense.MAX)
    cfg = model.config
    solution = solve_lp(program, cfg.tolerances, cfg.max_dense_bytes)
    if not solution.is_optimal:
        raise ModelingError(
            f"fixed-plan block s{scenario_index} b{block} y{year} is "
            f"{solution.status.value} under {plan.label(cfg.years)}"
        )
    x = solution.x
    hits = handle.registry.check(
        x, handle.dispatch_buses(x), cfg.tolerances.integrality_tol
    )
    return BlockOutcome(
        scenario=scenario_index,
        block=block,
        year=year,
        profit=handle.profit.value(x),
        raw_profit=handle.raw_profit(x),
        primal_cost=handle.primal_cost.value(x),
        dual_objective=handle.dual_objective.value(x),
        big_m_hits=tuple(hits),
    )


def discounted_objective(
    model: SystemModel,
    scenarios: ScenarioSet,
    plan: InvestmentPlan,
    profits: dict[tuple[int, int, int], float],
) -> float:
    """Σ_y (1+r)^−y (Σ_{s,b} π_s T_b Π_sby − investment payments of year y)."""
    total = []
    for year in model.years:
        operating = math.fsum(
            scenarios[s].probability * model.block(b).duration * profits[(s, b, year)]
            for s in range(len(scenarios))
            for b, y in model.grid()
            if y == year
        )
        net = operating - invest_cost(model, plan, year)
        total.append(model.config.discount_factor(year) * net)
    return math.fsum(total)


def evaluate_plan(
    model: SystemModel,
    scenarios: ScenarioSet,
    plan: InvestmentPlan,
    cache: Optional[dict[BlockKey, BlockOutcome]] = None,
) -> PlannerResult:
    """Discounted expected profit of a fixed plan under the optimistic convention.

    Blocks are solved on `model.config.threads` workers. Blocks already priced
    for the same builds are taken from `cache` when one is given.
    """
    start = time.monotonic()
    keys = [(s, b, y) for s in range(len(scenarios)) for b, y in model.grid()]

    def solve(key: tuple[int, int, int]) -> BlockOutcome:
        s, b, y = key
        cache_key = (s, b, y, frozenset(plan.built_in(y).items()))
        if cache is not None and cache_key in cache:
            return cache[cache_key]
        outcome = solve_fixed_block(model, scenarios, s, b, y, plan)
        if cache is not None:
            cache[cache_key] = outcome
        return outcome

    with ThreadPoolExecutor(max_workers=model.config.threads) as pool:
        outcomes = list(pool.map(solve, keys))

    profits = {(o.scenario, o.block, o.year): o.profit for o in outcomes}
    objective = discounted_objective(model, scenarios, plan, profits)
    log.debug(f"Plan {plan.label(model.config.years)}: {objective:,.2f} $")
    return PlannerResult(
        plan=plan,
        objective=objective,
        mode="oracle",
        bound=objective,
        plans_evaluated=1,
        trace=trace_frame(
            model,
            scenarios,
            ((o.scenario, o.block, o.year, o.profit) for o in outcomes),
        ),
        big_m_hits=[hit for o in outcomes for hit in o.big_m_hits],
        elapsed=time.monotonic() - start,
    )


def enumerate_oracle(
    model: SystemModel,
    scenarios: ScenarioSet,
    space: Optional[CandidateSpace] = None,
) -> PlannerResult:
    """Price every plan of the candidate space and return the best one.

    Ties within a relative 1e-7 go to the plan with the smallest sort key.

    Raises:
        EnumerationCapError: If the space holds more than `max_plans` plans.
    """
    start = time.monotonic()
    space = space or candidate_space(model, scenarios)
    cache: dict[BlockKey, BlockOutcome] = {}
    best: Optional[PlannerResult] = None
    count = 0
    for plan in enumerate_plans(space, model.config.max_plans):
        result = evaluate_plan(model, scenarios, plan, cache)
        count += 1
        if best is None or prefer(result.objective, plan, best.objective, best.plan):
            best = result
            label = plan.label(model.config.years)
            log.debug(f"Oracle incumbent {label}: {result.objective:,.2f} $")
    assert best is not None
    best.plans_evaluated = count
    best.elapsed = time.monotonic() - start
    log.info(
        f"Oracle evaluated {count} plans in {best.elapsed:.1f}s; best "
        f"{best.plan.label(model.config.years)} at {best.objective_musd:.4f} $M"
    )
    return best
