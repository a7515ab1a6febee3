"""
Study procedures measuring what a simplified scenario model costs the GENCO.

Each comparison plans twice: once on a reduced scenario set (no failures, or
decorrelated wind), then on the full set. The plan found on the reduced set is
re-priced on the full set, so the two profits are comparable and the full-set
optimum can never be worse.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import pandas as pd

from gep_planner.common.exceptions import ModelingError
from gep_planner.common.logging_config import setup_logger
from gep_planner.planner.oracle import evaluate_plan
from gep_planner.planner.plan import InvestmentPlan
from gep_planner.planner.solve import plan_expansion
from gep_planner.scenarios.availability import base_scenario_set, enumerate_n_minus_1
from gep_planner.scenarios.combine import combine
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.scenarios.wind import decorrelate
from gep_planner.system.model import (
    SystemModel,
    with_candidate_cost,
    with_candidate_turbines,
)

# Configure logging
log = setup_logger(__name__)

DOMINANCE_RTOL = 1e-6

FAILURE_COLUMNS = (
    "C^P ($/MWh)",
    "B_NF",
    "pi_NF ($M)",
    "B_F",
    "pi_F ($M)",
    "delta (%)",
)
CORRELATION_COLUMNS = ("B_NC", "pi_NC ($M)", "B_C", "pi_C ($M)", "delta (%)")


@dataclass(frozen=True)
class Comparison:
    """Reduced-set plan with its full-set profit, and the full-set optimum."""

    reduced_plan: InvestmentPlan
    reduced_profit: float
    full_plan: InvestmentPlan
    full_profit: float

    @property
    def delta(self) -> Optional[float]:
        """Profit gain in percent; None unless the reduced-set profit is positive."""
        if self.reduced_profit <= 0:
            return None
        return 100.0 * (self.full_profit - self.reduced_profit) / self.reduced_profit

    def row(self, years: int, reduced: str, full: str) -> dict:
        return {
            f"B_{reduced}": self.reduced_plan.label(years),
            f"pi_{reduced} ($M)": self.reduced_profit / 1e6,
            f"B_{full}": self.full_plan.label(years),
            f"pi_{full} ($M)": self.full_profit / 1e6,
            "delta (%)": self.delta,
        }


def compare_scenario_sets(
    model: SystemModel,
    reduced: ScenarioSet,
    full: ScenarioSet,
    mode: str = "oracle",
) -> Comparison:
    """Plan on `reduced`, re-price that plan on `full`, then plan on `full`.

    Raises:
        ModelingError: If the full-set optimum is below the re-priced plan.
    """
    reduced_plan = plan_expansion(model, reduced, mode).plan
    reduced_profit = evaluate_plan(model, full, reduced_plan).objective
    best = plan_expansion(model, full, mode)

    tolerance = max(DOMINANCE_RTOL, model.config.mip_gap) * max(1.0, abs(reduced_profit))
    if best.objective < reduced_profit - tolerance:
        raise ModelingError(
            f"full-set optimum {best.objective:,.2f} $ is below the re-priced "
            f"reduced-set plan {reduced_profit:,.2f} $"
        )
    return Comparison(reduced_plan, reduced_profit, best.plan, best.objective)


def _with_wind(
    avail: ScenarioSet, wind: Optional[ScenarioSet], model: SystemModel
) -> ScenarioSet:
    return avail if wind is None else combine(avail, wind, model.config.max_scenarios)


def run_failure_study(
    model: SystemModel,
    costs: Sequence[float],
    wind: Optional[ScenarioSet] = None,
    mode: str = "oracle",
) -> pd.DataFrame:
    """Impact of forced outages on the expansion decision, one row per candidate cost.

    The reduced set holds only the all-available scenario, the full set every
    scenario with up to `max_outages` failures; wind scenarios, when given, are
    combined with both.
    """
    rows = []
    for cost in costs:
        priced = with_candidate_cost(model, cost)
        reduced = _with_wind(base_scenario_set(), wind, priced)
        full = _with_wind(enumerate_n_minus_1(priced), wind, priced)
        comparison = compare_scenario_sets(priced, reduced, full, mode)
        row = {"C^P ($/MWh)": cost, **comparison.row(model.config.years, "NF", "F")}
        log.info(
            f"C^P={cost:g}: B_NF={row['B_NF']} pi_NF={row['pi_NF ($M)']:.4f} $M, "
            f"B_F={row['B_F']} pi_F={row['pi_F ($M)']:.4f} $M"
        )
        rows.append(row)
    return pd.DataFrame(rows, columns=list(FAILURE_COLUMNS))


def run_correlation_study(
    model: SystemModel,
    avail: ScenarioSet,
    correlated: ScenarioSet,
    seed: int,
    mode: str = "oracle",
) -> pd.DataFrame:
    """Impact of cross-site wind correlation on the expansion decision (one row)."""
    cfg = model.config
    independent = decorrelate(
        correlated, seed, cfg.decorrelation_threshold, cfg.decorrelation_max_tries
    )
    comparison = compare_scenario_sets(
        model,
        combine(avail, independent, cfg.max_scenarios),
        combine(avail, correlated, cfg.max_scenarios),
        mode,
    )
    return pd.DataFrame(
        [comparison.row(cfg.years, "NC", "C")], columns=list(CORRELATION_COLUMNS)
    )


def run_turbine_sweep(
    model: SystemModel,
    avail: ScenarioSet,
    correlated: ScenarioSet,
    turbines: Sequence[int],
    seed: int,
    mode: str = "oracle",
) -> pd.DataFrame:
    """Correlation study repeated for several candidate farm sizes.

    Candidate investment costs are recomputed from each farm's capacity; the
    `C^I ($M)` column is the yearly payment for all candidate farms together.
    """
    frames = []
    for n_turbines in turbines:
        sized = with_candidate_turbines(model, n_turbines)
        invest = sum(w.annual_invest_cost for w in sized.candidate_wind) / 1e6
        frame = run_correlation_study(sized, avail, correlated, seed, mode)
        frame.insert(0, "C^I ($M)", invest)
        frame.insert(0, "N^T", n_turbines)
        log.info(
            f"N^T={n_turbines}: B_NC={frame.at[0, 'B_NC']} B_C={frame.at[0, 'B_C']}"
        )
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)
