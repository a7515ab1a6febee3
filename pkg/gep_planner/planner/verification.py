"""
End-to-end checks of a planning result.

Every block of the reported plan is re-solved as a fixed-plan LP and three
quantities are compared: the linear profit the planner optimized, the raw
Σ (λ − C)·P reconstructed from prices and outputs, and the profit recorded in the
result's trace. The strong-duality residual of each block is reported alongside.
"""

from dataclasses import dataclass

import pandas as pd

from gep_planner.common.logging_config import setup_logger
from gep_planner.planner.oracle import solve_fixed_block
from gep_planner.planner.result import PlannerResult
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.system.model import SystemModel

# Configure logging
log = setup_logger(__name__)

CONSISTENCY_RTOL = 1e-5


@dataclass(frozen=True)
class LinearizationReport:
    """Per-block comparison; `frame` has one row per (scenario, block, year)."""

    frame: pd.DataFrame
    rtol: float = CONSISTENCY_RTOL

    @property
    def max_error(self) -> float:
        if self.frame.empty:
            return 0.0
        return float(self.frame["relative error"].max())

    @property
    def passed(self) -> bool:
        return bool(self.frame["ok"].all()) if not self.frame.empty else True


def verify_linearization(
    model: SystemModel, scenarios: ScenarioSet, result: PlannerResult
) -> LinearizationReport:
    """Check the linear profit of `result` against raw price × quantity products."""
    trace = result.trace
    recorded = {
        (label, int(block), int(year)): float(profit)
        for label, block, year, profit in zip(
            trace["scenario"], trace["block"], trace["year"], trace["profit ($/h)"]
        )
    }
    rows = []
    for s, scenario in enumerate(scenarios):
        for block, year in model.grid():
            outcome = solve_fixed_block(model, scenarios, s, block, year, result.plan)
            traced = recorded.get((scenario.label, block, year), float("nan"))
            scale = max(1.0, abs(outcome.primal_cost), abs(outcome.profit))
            errors = (
                abs(outcome.profit - outcome.raw_profit),
                abs(outcome.profit - traced),
                abs(outcome.primal_cost - outcome.dual_objective),
            )
            error = max(errors) / scale
            rows.append(
                {
                    "scenario": scenario.label,
                    "block": block,
                    "year": year,
                    "linear profit ($/h)": outcome.profit,
                    "raw profit ($/h)": outcome.raw_profit,
                    "traced profit ($/h)": traced,
                    "duality residual ($/h)": errors[2],
                    "relative error": error,
                    "ok": error <= CONSISTENCY_RTOL,
                }
            )
    report = LinearizationReport(pd.DataFrame(rows))
    if report.passed:
        log.info(
            f"Linearization consistent on {len(rows)} blocks "
            f"(max {report.max_error:.2e})"
        )
    else:
        failed = int((~report.frame["ok"]).sum())
        log.warning(f"Linearization inconsistent on {failed} of {len(rows)} blocks")
    return report
