"""GENCO pool profit from cleared markets."""

import math
from typing import Mapping

import pandas as pd

from gep_planner.common.exceptions import GridIncompleteError
from gep_planner.common.logging_config import setup_logger
from gep_planner.market.clearing import ClearingResult, GridKey
from gep_planner.planner.plan import InvestmentPlan
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.system.model import SystemModel

# Configure logging
log = setup_logger(__name__)


def scenario_profit(result: ClearingResult, model: SystemModel) -> float:
    """Hourly GENCO profit in $/h: Σ (LMP at the asset's bus − cost) × output.

    Candidates are priced at the bus where they were built; unbuilt candidates
    produce nothing and earn nothing.
    """
    built = result.problem.built
    terms = []
    for unit in model.units:
        bus = unit.bus if unit.bus is not None else built.get(unit.id)
        if bus is None or not unit.owned_by_genco:
            continue
        terms.append((result.lmp[bus] - unit.marginal_cost) * result.dispatch[unit.id])
    for farm in model.wind_farms:
        bus = farm.bus if farm.bus is not None else built.get(farm.id)
        if bus is None or not farm.owned_by_genco:
            continue
        terms.append(result.lmp[bus] * result.wind_dispatch[farm.id])
    return math.fsum(terms)


def invest_cost(model: SystemModel, plan: InvestmentPlan, year: int) -> float:
    """Annualized investment payments in $ due in `year` for assets standing then."""
    assets = {a.id: a for a in (*model.candidate_units, *model.candidate_wind)}
    return math.fsum(
        assets[cid].invest_cost(bus, year) for cid, bus in plan.built_in(year).items()
    )


def profit_trace(
    results: Mapping[GridKey, ClearingResult], model: SystemModel, scenarios: ScenarioSet
) -> pd.DataFrame:
    """One row per (scenario, block, year) with the hourly profit and its weight."""
    rows = []
    for (s, block, year), result in sorted(results.items()):
        rows.append(
            {
                "scenario": scenarios[s].label,
                "block": block,
                "year": year,
                "probability": scenarios[s].probability,
                "duration (h)": model.block(block).duration,
                "profit ($/h)": scenario_profit(result, model),
            }
        )
    return pd.DataFrame(rows)


def expected_discounted_profit(
    results: Mapping[GridKey, ClearingResult],
    plan: InvestmentPlan,
    model: SystemModel,
    scenarios: ScenarioSet,
) -> float:
    """Σ_y (1+r)^−y (Σ_{s,b} π_s T_b Π_sby − investment payments of year y), in $.

    Raises:
        GridIncompleteError: If a (scenario, block, year) cell is missing.
    """
    missing = [
        (s, block, year)
        for s in range(len(scenarios))
        for block, year in model.grid()
        if (s, block, year) not in results
    ]
    if missing:
        raise GridIncompleteError(
            f"{len(missing)} cleared cells are missing, first {missing[0]}"
        )

    total = []
    for year in model.years:
        operating = math.fsum(
            scenarios[s].probability
            * model.block(block).duration
            * scenario_profit(results[(s, block, y)], model)
            for s in range(len(scenarios))
            for block, y in model.grid()
            if y == year
        )
        net = operating - invest_cost(model, plan, year)
        total.append(model.config.discount_factor(year) * net)
    value = math.fsum(total)
    log.debug(
        f"Expected discounted profit of {plan.label(model.config.years)}: "
        f"{value:,.2f} $"
    )
    return value
