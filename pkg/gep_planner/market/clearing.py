"""
Hourly DC-OPF market clearing for one (scenario, block, year).

The clearing LP minimizes the hourly production cost plus the value of lost load
subject to unit, shed and wind limits, one power balance row per bus, flow caps in
both directions of every line and angle pins. The dual of a bus's balance row is
its locational marginal price. Every bus has a shed column bounded by its load, so
the price never exceeds VOLL where there is load; a bus without load may price above.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

from gep_planner.common.exceptions import LpNumericalError, ModelingError
from gep_planner.common.logging_config import setup_logger
from gep_planner.lp.problem import (
    LinearProgram,
    LinExpr,
    LpBuilder,
    LpSolution,
    Relation,
    Sense,
)
from gep_planner.lp.simplex import solve_lp
from gep_planner.market.network import island_pins
from gep_planner.planner.plan import InvestmentPlan
from gep_planner.scenarios.types import Scenario, ScenarioSet
from gep_planner.system.model import SystemModel, block_load

# Configure logging
log = setup_logger(__name__)

GridKey = tuple[int, int, int]  # (scenario index, block id, year)


@dataclass(frozen=True)
class ClearingProblem:
    """One lower-level instance; `built` maps built candidates to their bus."""

    model: SystemModel
    scenario: Scenario
    block: int
    year: int
    built: Mapping[str, int] = field(default_factory=dict)


@dataclass
class _Layout:
    """Column and row indices of a built clearing LP."""

    unit: dict[str, int] = field(default_factory=dict)
    wind: dict[str, int] = field(default_factory=dict)
    shed: dict[int, int] = field(default_factory=dict)
    angle: dict[int, int] = field(default_factory=dict)
    balance: dict[int, int] = field(default_factory=dict)
    flow: dict[tuple[str, str], int] = field(default_factory=dict)
    pin: dict[int, int] = field(default_factory=dict)
    load: dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ClearingResult:
    """Named primal and dual quantities of a cleared market.

    Powers are in MW, prices and duals in $/MWh, costs in $/h. Flows are positive in
    the from→to direction of the line. `theta` is keyed by (line id, "fwd"/"rev").
    """

    problem: ClearingProblem
    dispatch: dict[str, float]
    wind_dispatch: dict[str, float]
    shed: dict[int, float]
    load: dict[int, float]
    angles: dict[int, float]
    flows: dict[str, float]
    lmp: dict[int, float]
    system_cost: float
    dual_cost: float
    phi_max: dict[str, float]
    phi_min: dict[str, float]
    beta_max: dict[int, float]
    beta_min: dict[int, float]
    gamma_max: dict[str, float]
    gamma_min: dict[str, float]
    theta: dict[tuple[str, str], float]
    xi: dict[int, float]

    @property
    def total_shed(self) -> float:
        return math.fsum(self.shed.values())


def _wind_limit(problem: ClearingProblem, farm_id: str) -> float:
    model = problem.model
    farm = next(w for w in model.wind_farms if w.id == farm_id)
    bus = farm.bus if farm.bus is not None else problem.built.get(farm.id)
    if bus is None:
        return 0.0
    return problem.scenario.farm_power(bus, farm.n_turbines)


def _asset_bus(
    problem: ClearingProblem, asset_id: str, bus: Optional[int]
) -> Optional[int]:
    return bus if bus is not None else problem.built.get(asset_id)


def _build(problem: ClearingProblem) -> tuple[LinearProgram, _Layout]:
    model = problem.model
    availability = problem.scenario.availability
    lp = LpBuilder(f"clear_{problem.scenario.label}_b{problem.block}_y{problem.year}")
    layout = _Layout()
    injections: dict[int, LinExpr] = {n: LinExpr() for n in model.bus_ids}

    for unit in model.units:
        bus = _asset_bus(problem, unit.id, unit.bus)
        limit = 0.0
        if bus is not None:
            limit = availability.unit_status(unit.id) * unit.capacity
        col = lp.add_col(f"P_{unit.id}", 0.0, limit, unit.marginal_cost)
        layout.unit[unit.id] = col
        if bus is not None:
            injections[bus].add_term(col, 1.0)

    for farm in model.wind_farms:
        bus = _asset_bus(problem, farm.id, farm.bus)
        col = lp.add_col(f"W_{farm.id}", 0.0, _wind_limit(problem, farm.id))
        layout.wind[farm.id] = col
        if bus is not None:
            injections[bus].add_term(col, 1.0)

    for n in model.bus_ids:
        load = block_load(model, n, problem.block, problem.year)
        layout.load[n] = load
        col = lp.add_col(f"LS_{n}", 0.0, load, model.config.voll)
        layout.shed[n] = col
        injections[n].add_term(col, 1.0)

    for n in model.bus_ids:
        layout.angle[n] = lp.add_col(f"delta_{n}", -math.inf, math.inf)

    for line in model.lines:
        k = availability.line_status(line.id)
        flow = LinExpr(
            {
                layout.angle[line.from_bus]: k * line.susceptance,
                layout.angle[line.to_bus]: -k * line.susceptance,
            }
        )
        injections[line.from_bus] = injections[line.from_bus] - flow
        injections[line.to_bus] = injections[line.to_bus] + flow

    for n in model.bus_ids:
        layout.balance[n] = lp.add_row(
            injections[n], Relation.EQ, layout.load[n], f"bal_{n}"
        )

    for line in model.lines:
        k = availability.line_status(line.id)
        forward = LinExpr(
            {
                layout.angle[line.from_bus]: k * line.susceptance,
                layout.angle[line.to_bus]: -k * line.susceptance,
            }
        )
        cap = k * line.capacity
        for direction, flow in (("fwd", forward), ("rev", -forward)):
            layout.flow[(line.id, direction)] = lp.add_row(
                flow, Relation.LE, cap, f"flow_{line.id}_{direction}"
            )

    for n in island_pins(model, availability):
        layout.pin[n] = lp.add_row(
            LinExpr.var(layout.angle[n]), Relation.EQ, 0.0, f"pin_{n}"
        )

    return lp.build(Sense.MIN), layout


def build_clearing_lp(problem: ClearingProblem) -> LinearProgram:
    """Assemble the clearing LP: columns are unit, wind, shed and angle variables."""
    program, _ = _build(problem)
    return program


def _split(value: float) -> tuple[float, float]:
    """Reduced cost → (upper-bound dual ≤ 0, lower-bound dual ≥ 0)."""
    return min(value, 0.0), max(value, 0.0)


def _result(
    problem: ClearingProblem, layout: _Layout, solution: LpSolution
) -> ClearingResult:
    model = problem.model
    x, y, d = solution.x, solution.duals, solution.reduced_costs
    flows = {}
    for line in model.lines:
        k = problem.scenario.availability.line_status(line.id)
        spread = x[layout.angle[line.from_bus]] - x[layout.angle[line.to_bus]]
        flows[line.id] = k * line.susceptance * spread
    unit_split = {uid: _split(d[c]) for uid, c in layout.unit.items()}
    wind_split = {wid: _split(d[c]) for wid, c in layout.wind.items()}
    shed_split = {n: _split(d[c]) for n, c in layout.shed.items()}
    return ClearingResult(
        problem=problem,
        dispatch={uid: float(x[c]) for uid, c in layout.unit.items()},
        wind_dispatch={wid: float(x[c]) for wid, c in layout.wind.items()},
        shed={n: float(x[c]) for n, c in layout.shed.items()},
        load=dict(layout.load),
        angles={n: float(x[c]) for n, c in layout.angle.items()},
        flows=flows,
        lmp={n: float(y[r]) for n, r in layout.balance.items()},
        system_cost=solution.objective,
        dual_cost=solution.dual_objective,
        phi_max={k: v[0] for k, v in unit_split.items()},
        phi_min={k: v[1] for k, v in unit_split.items()},
        beta_max={k: v[0] for k, v in shed_split.items()},
        beta_min={k: v[1] for k, v in shed_split.items()},
        gamma_max={k: v[0] for k, v in wind_split.items()},
        gamma_min={k: v[1] for k, v in wind_split.items()},
        theta={key: float(y[r]) for key, r in layout.flow.items()},
        xi={n: float(y[r]) for n, r in layout.pin.items()},
    )


def clear_market(problem: ClearingProblem) -> ClearingResult:
    """Solve the clearing LP and map the solution back to named quantities.

    Raises:
        ModelingError: If the LP is not optimal; shed variables make every
            instance feasible and the cost is bounded below.
        LpNumericalError: If the primal and dual costs disagree.
    """
    program, layout = _build(problem)
    tolerances = problem.model.config.tolerances
    solution = solve_lp(program, tolerances, problem.model.config.max_dense_bytes)
    if not solution.is_optimal:
        raise ModelingError(
            f"market clearing of {problem.scenario.label} "
            f"b{problem.block} y{problem.year} is {solution.status.value}"
        )
    gap = abs(solution.objective - solution.dual_objective)
    if gap > tolerances.duality_tol * (1.0 + abs(solution.objective)):
        log.warning(
            f"Duality gap {gap:.3g} in clearing of {problem.scenario.label} "
            f"b{problem.block} y{problem.year}"
        )
        raise LpNumericalError(f"clearing LP duality gap {gap:.3g} above tolerance")
    return _result(problem, layout, solution)


def clear_grid(
    model: SystemModel,
    scenarios: ScenarioSet,
    plan: Optional[InvestmentPlan] = None,
) -> dict[GridKey, ClearingResult]:
    """Clear every (scenario, block, year) cell under a fixed plan.

    Cells are solved on `model.config.threads` workers and collected in the
    canonical grid order.
    """
    keys = [
        (s, block, year)
        for s in range(len(scenarios))
        for block, year in model.grid()
    ]

    def clear(key: GridKey) -> ClearingResult:
        s, block, year = key
        built = plan.built_in(year) if plan is not None else {}
        return clear_market(ClearingProblem(model, scenarios[s], block, year, built))

    with ThreadPoolExecutor(max_workers=model.config.threads) as pool:
        results = list(pool.map(clear, keys))
    log.info(f"Cleared {len(keys)} market instances")
    return dict(zip(keys, results))
