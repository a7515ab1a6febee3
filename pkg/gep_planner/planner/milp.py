"""
Single-level MILP of the expansion problem.

One investment column u per (candidate, bus, year) build option, the cumulative
indicators û built from them, and one primal-dual block per (scenario, block,
year). The objective is the discounted expected GENCO profit net of investment
payments.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from gep_planner.common.exceptions import ModelSizeError
from gep_planner.common.logging_config import setup_logger
from gep_planner.lp.problem import (
    LinearProgram,
    LinExpr,
    LpBuilder,
    Relation,
    Sense,
    lin_sum,
)
from gep_planner.planner.block_builder import (
    BlockHandle,
    build_block,
    linearize_profit_terms,
)
from gep_planner.planner.plan import CandidateSpace, InvestmentPlan, candidate_space
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.system.model import SystemModel

# Configure logging
log = setup_logger(__name__)

BuildKey = tuple[str, int, int]


@dataclass
class MilpModel:
    """The LP relaxation plus what is needed to read plans back from it."""

    lp: LinearProgram
    binaries: tuple[int, ...]
    u_cols: dict[BuildKey, int]
    space: CandidateSpace
    handles: list[BlockHandle]
    model: SystemModel
    scenarios: ScenarioSet

    def plan_from(self, x: np.ndarray) -> InvestmentPlan:
        """Round the investment columns of an integral point to a plan."""
        builds = {
            cid: (bus, year)
            for (cid, bus, year), col in self.u_cols.items()
            if x[col] > 0.5
        }
        return InvestmentPlan.from_builds(self.space.ids, builds)

    def fixing(self, plan: InvestmentPlan) -> dict[int, tuple[float, float]]:
        """Column bounds that pin every binary to `plan`."""
        return {
            col: (1.0, 1.0) if plan.decision(cid) == (bus, year) else (0.0, 0.0)
            for (cid, bus, year), col in self.u_cols.items()
        }


def _dense_bytes(lp: LpBuilder) -> int:
    m, n = lp.n_rows, lp.n_cols
    return 8 * m * (n + 2 * m)


def build_milp(
    model: SystemModel,
    scenarios: ScenarioSet,
    space: Optional[CandidateSpace] = None,
) -> MilpModel:
    """Assemble the single-level MILP.

    Raises:
        ModelSizeError: If the dense simplex matrix of the relaxation would exceed
            `max_dense_bytes`.
    """
    cfg = model.config
    space = space or candidate_space(model, scenarios)
    lp = LpBuilder("gep_milp")

    u_cols: dict[BuildKey, int] = {}
    for index, asset in enumerate(space.candidates):
        options = space.options(index)
        for bus, year in options:
            name = f"u_{asset.id}_n{bus}_y{year}"
            u_cols[(asset.id, bus, year)] = lp.add_col(name, 0.0, 1.0)
        if options:
            lp.add_row(
                lin_sum(LinExpr.var(u_cols[(asset.id, b, y)]) for b, y in options),
                Relation.LE,
                1.0,
                f"once_{asset.id}",
            )

    # members of an interchangeable group take their options in ascending order
    for group in space.groups:
        options = space.options(group[0])
        for a, b in zip(group, group[1:]):
            ida, idb = space.candidates[a].id, space.candidates[b].id
            order = LinExpr()
            for k, (bus, year) in enumerate(options, start=1):
                order.add_term(u_cols[(ida, bus, year)], k)
                order.add_term(u_cols[(idb, bus, year)], -k)
            lp.add_row(order, Relation.LE, 0.0, f"sym_{ida}_{idb}")

    def u_hat(candidate_id: str, bus: int, year: int) -> LinExpr:
        return lin_sum(
            LinExpr.var(u_cols[(candidate_id, bus, y)])
            for y in range(1, year + 1)
            if (candidate_id, bus, y) in u_cols
        )

    handles = []
    objective = []
    for s, scenario in enumerate(scenarios):
        for block, year in model.grid():
            handle = build_block(lp, model, scenario, s, block, year, u_hat)
            weight = (
                cfg.discount_factor(year)
                * scenario.probability
                * model.block(block).duration
            )
            objective.append(linearize_profit_terms(handle) * weight)
            handles.append(handle)
        if _dense_bytes(lp) > cfg.max_dense_bytes:
            raise ModelSizeError(
                f"MILP relaxation reached {lp.n_rows} rows × {lp.n_cols} columns after "
                f"{s + 1} of {len(scenarios)} scenarios, beyond max_dense_bytes="
                f"{cfg.max_dense_bytes}; use oracle mode or fewer scenarios"
            )

    for asset in space.candidates:
        for year in model.years:
            for bus in asset.candidate_buses:
                cost = cfg.discount_factor(year) * asset.invest_cost(bus, year)
                objective.append(u_hat(asset.id, bus, year) * -cost)

    lp.add_objective(lin_sum(objective))
    program = lp.build(Sense.MAX)
    binaries = tuple(sorted(u_cols.values()))
    log.info(
        f"Built MILP: {program.n_rows} rows, {program.n_cols} columns, "
        f"{len(binaries)} binaries, {len(handles)} blocks"
    )
    return MilpModel(
        lp=program,
        binaries=binaries,
        u_cols=u_cols,
        space=space,
        handles=handles,
        model=model,
        scenarios=scenarios,
    )
