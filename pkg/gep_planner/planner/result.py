"""Planner results and the policy applied to big-M diagnostics."""

from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

import pandas as pd

from gep_planner.common.exceptions import BigMBoundError
from gep_planner.common.logging_config import setup_logger
from gep_planner.planner.linearization import BigMHit
from gep_planner.planner.plan import InvestmentPlan
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.system.config import StudyConfig
from gep_planner.system.model import SystemModel

# Configure logging
log = setup_logger(__name__)

# plans whose objectives differ by less than this (relative) are ties
TIE_RTOL = 1e-7

TRACE_COLUMNS = (
    "scenario",
    "block",
    "year",
    "probability",
    "duration (h)",
    "profit ($/h)",
)


def tie_tolerance(value: float) -> float:
    return TIE_RTOL * max(1.0, abs(value))


def prefer(
    value: float, plan: InvestmentPlan, best_value: float, best_plan: InvestmentPlan
) -> bool:
    """True when (value, plan) beats the best: higher, or tied with a smaller key."""
    if value > best_value + tie_tolerance(best_value):
        return True
    return abs(value - best_value) <= tie_tolerance(best_value) and (
        plan.sort_key() < best_plan.sort_key()
    )


TraceRow = tuple[int, int, int, float]


def trace_frame(
    model: SystemModel, scenarios: ScenarioSet, rows: Iterable[TraceRow]
) -> pd.DataFrame:
    """Profit trace from (scenario index, block, year, profit $/h) tuples."""
    records = [
        (
            scenarios[s].label,
            block,
            year,
            scenarios[s].probability,
            model.block(block).duration,
            profit,
        )
        for s, block, year, profit in rows
    ]
    return pd.DataFrame(records, columns=list(TRACE_COLUMNS))


@dataclass
class PlannerResult:
    """Outcome of one planning solve.

    Attributes:
        plan: Best plan found.
        objective: Discounted expected profit of `plan` in $.
        mode: "milp" or "oracle".
        bound: Best proven upper bound on the objective in $.
        gap: Relative distance between bound and objective.
        nodes: Branch-and-bound nodes solved (0 for the oracle).
        plans_evaluated: Plans priced by the oracle (0 for branch-and-bound).
        trace: Per (scenario, block, year) hourly profit of `plan`.
        big_m_hits: Policy bounds active at the reported optimum.
        elapsed: Wall-clock seconds.
        agreement: Cross-check against the other mode, when both ran.
    """

    plan: InvestmentPlan
    objective: float
    mode: str
    bound: float
    gap: float = 0.0
    nodes: int = 0
    plans_evaluated: int = 0
    trace: pd.DataFrame = field(
        default_factory=lambda: pd.DataFrame(columns=TRACE_COLUMNS)
    )
    big_m_hits: list[BigMHit] = field(default_factory=list)
    elapsed: float = 0.0
    timed_out: bool = False
    agreement: Optional[dict[str, Any]] = None

    @property
    def objective_musd(self) -> float:
        return self.objective / 1e6

    def summary(self, years: int = 1) -> dict[str, Any]:
        """JSON-serializable view for the plan output file."""
        return {
            "mode": self.mode,
            "plan": self.plan.to_dict(),
            "buses": self.plan.label(years),
            "objective_usd": self.objective,
            "bound_usd": self.bound,
            "gap": self.gap,
            "nodes": self.nodes,
            "plans_evaluated": self.plans_evaluated,
            "timed_out": self.timed_out,
            "big_m_hits": [hit.label for hit in self.big_m_hits],
            "agreement": self.agreement,
        }


def enforce_big_m(result: PlannerResult, config: StudyConfig) -> PlannerResult:
    """Fail, or warn when `strict_big_m` is off, if a policy bound is active.

    Raises:
        BigMBoundError: With `strict_big_m` and at least one active bound.
    """
    if not result.big_m_hits:
        return result
    listed = ", ".join(
        f"{h.label}={h.value:.6g} (bound {h.bound:.6g})" for h in result.big_m_hits[:5]
    )
    log.warning(
        f"{len(result.big_m_hits)} big-M bound(s) active at the optimum: {listed}"
    )
    if config.strict_big_m:
        raise BigMBoundError(
            f"linearization bound active at the optimum ({listed}); "
            f"raise big_m_factor above {config.big_m_factor}"
        )
    return result
