"""
Primal-dual blocks of the single-level reformulation.

For one (scenario, block, year) the lower-level clearing LP is first described
abstractly: every variable is free and every limit, including simple bounds, is a
row whose coefficients and right-hand side may depend on the investment
indicators û. `build_block` then emits into a shared `LpBuilder`

  * the primal rows (constant simple bounds become column bounds),
  * one dual column per lower-level row with its sign or big-M bounds,
  * one dual row Σ_i a_ij y_i = c_j per lower-level variable,
  * the strong-duality row c·x − b·y = 0,

and returns the block's GENCO profit, written through the complementarity
identities as −Σ (capacity × dual of the capacity row) over GENCO assets. Every
product of û with a continuous column goes through
`linearize_binary_continuous`; with constant û (a fixed plan) no products remain
and the block is an ordinary LP.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from gep_planner.lp.problem import LinExpr, LpBuilder, Relation, lin_sum
from gep_planner.market.network import island_pins
from gep_planner.planner.linearization import (
    ArtificialBound,
    BigMRegistry,
    linearize_binary_continuous,
)
from gep_planner.scenarios.types import Scenario
from gep_planner.system.model import SystemModel, block_load

INF = math.inf

# û for (candidate id, bus, year): constants for a fixed plan, binaries in the MILP
UHat = Callable[[str, int, int], LinExpr]
Sites = tuple[tuple[LinExpr, int], ...]


@dataclass
class Param:
    """const + Σ coef·χ where every χ is a 0/1 expression.

    The χ of one parameter belong to one candidate and are mutually exclusive, so
    at most one term is active.
    """

    const: float = 0.0
    terms: list[tuple[float, LinExpr]] = field(default_factory=list)

    @classmethod
    def of(cls, const: float, terms: tuple[tuple[float, LinExpr], ...]) -> "Param":
        out = cls(const)
        for coef, chi in terms:
            if not coef:
                continue
            if chi.is_constant:
                out.const += coef * chi.const
            else:
                out.terms.append((coef, chi))
        return out

    @property
    def is_zero(self) -> bool:
        return not self.const and not self.terms

    @property
    def upper(self) -> float:
        return self.const + max([0.0, *(c for c, _ in self.terms)])

    def chi_total(self) -> LinExpr:
        return lin_sum(chi for _, chi in self.terms)


@dataclass
class _Var:
    name: str
    cost: float
    lb: float
    ub: float
    col: int = -1


@dataclass
class _Row:
    name: str
    coeffs: dict[str, Param]
    rel: Relation
    rhs: Param
    dual_lb: float
    dual_ub: float
    simple: bool = False
    owner: Optional[str] = None
    bus: Optional[int] = None
    dual: int = -1


@dataclass(frozen=True)
class OwnedAsset:
    """A GENCO asset in one block: output column, cost and where it may stand."""

    id: str
    output: int
    cost: float
    sites: Sites


@dataclass
class BlockHandle:
    """What the planner reads back from one emitted block."""

    scenario: int
    block: int
    year: int
    profit: LinExpr
    primal_cost: LinExpr
    dual_objective: LinExpr
    prices: dict[int, int]
    owned: list[OwnedAsset]
    registry: BigMRegistry

    def raw_profit(self, x: np.ndarray) -> float:
        """Σ (λ at the asset's bus − cost) × output, from the price columns."""
        total = []
        for asset in self.owned:
            price = sum(chi.value(x) * x[self.prices[bus]] for chi, bus in asset.sites)
            total.append((price - asset.cost) * x[asset.output])
        return math.fsum(total)

    def dispatch_buses(self, x: np.ndarray, tol: float = 1e-7) -> set[int]:
        """Buses where a GENCO asset produces at `x`."""
        buses = set()
        for asset in self.owned:
            if x[asset.output] > tol:
                buses.update(bus for chi, bus in asset.sites if chi.value(x) > 0.5)
        return buses


class _LowerLevel:
    """Abstract clearing LP of one cell with û kept symbolic."""

    def __init__(self, model: SystemModel, scenario: Scenario, block: int, year: int):
        self.model = model
        self.scenario = scenario
        self.block = block
        self.year = year
        self.big_m = model.config.big_m_factor * model.config.voll
        self.variables: list[_Var] = []
        self.rows: list[_Row] = []
        self.owned: list[tuple[str, str, float, Sites]] = []
        self.genco_buses: set[int] = set()
        self.balance: dict[int, dict[str, Param]] = {n: {} for n in model.bus_ids}

    def add_bounded(
        self,
        var: str,
        cost: float,
        ub: Param,
        envelope: float,
        ub_dual_lb: float = -INF,
        owner: Optional[str] = None,
    ) -> None:
        """A variable in [0, ub] with both limits as rows."""
        self.variables.append(_Var(var, cost, 0.0, envelope))
        unit = {var: Param(1.0)}
        self.rows.append(
            _Row(
                f"ub_{var}", unit, Relation.LE, ub, ub_dual_lb, 0.0, not ub.terms, owner
            )
        )
        self.rows.append(_Row(f"lb_{var}", unit, Relation.GE, Param(), 0.0, INF, True))

    def inject(self, bus: int, var: str, coef: Param) -> None:
        if not coef.is_zero:
            self.balance[bus][var] = coef

    def _add_angle_term(self, bus: int, var: str, value: float) -> None:
        current = self.balance[bus].get(var, Param()).const
        self.balance[bus][var] = Param(current + value)

    def describe(self, u_hat: UHat) -> "_LowerLevel":
        model, scenario, year = self.model, self.scenario, self.year
        availability = scenario.availability

        for unit in model.existing_units:
            var = f"P_{unit.id}"
            cap = availability.unit_status(unit.id) * unit.capacity
            owner = unit.id if unit.owned_by_genco else None
            self.add_bounded(var, unit.marginal_cost, Param(cap), cap, owner=owner)
            self.inject(unit.bus, var, Param(1.0))
            if owner:
                sites = ((LinExpr.constant(1.0), unit.bus),)
                self.genco_buses.add(unit.bus)
                self.owned.append((unit.id, var, unit.marginal_cost, sites))

        for unit in model.candidate_units:
            cap = availability.unit_status(unit.id) * unit.capacity
            sites = tuple((u_hat(unit.id, n, year), n) for n in unit.candidate_buses)
            ub = Param.of(0.0, tuple((cap, chi) for chi, _ in sites))
            if ub.upper == 0.0:
                continue
            var = f"P_{unit.id}"
            dual_lb = -(abs(unit.marginal_cost) + self.big_m)
            self.add_bounded(var, unit.marginal_cost, ub, cap, dual_lb, unit.id)
            for chi, n in sites:
                self.inject(n, var, Param.of(0.0, ((1.0, chi),)))
            self.owned.append((unit.id, var, unit.marginal_cost, sites))
            self.genco_buses.update(unit.candidate_buses)

        for n in model.bus_ids:
            load = block_load(model, n, self.block, year)
            self.add_bounded(f"LS_{n}", model.config.voll, Param(load), load)
            self.inject(n, f"LS_{n}", Param(1.0))

        for farm in model.existing_wind:
            var = f"W_{farm.id}"
            limit = scenario.farm_power(farm.bus, farm.n_turbines)
            owner = farm.id if farm.owned_by_genco else None
            self.add_bounded(var, 0.0, Param(limit), limit, owner=owner)
            self.inject(farm.bus, var, Param(1.0))
            if owner:
                sites = ((LinExpr.constant(1.0), farm.bus),)
                self.genco_buses.add(farm.bus)
                self.owned.append((farm.id, var, 0.0, sites))

        for farm in model.candidate_wind:
            sites = tuple((u_hat(farm.id, n, year), n) for n in farm.candidate_buses)
            limits = [scenario.farm_power(n, farm.n_turbines) for _, n in sites]
            ub = Param.of(0.0, tuple((p, chi) for p, (chi, _) in zip(limits, sites)))
            if ub.upper == 0.0:
                continue
            var = f"W_{farm.id}"
            self.add_bounded(var, 0.0, ub, max(limits), -self.big_m, farm.id)
            for chi, n in sites:
                self.inject(n, var, Param.of(0.0, ((1.0, chi),)))
            self.owned.append((farm.id, var, 0.0, sites))
            self.genco_buses.update(farm.candidate_buses)

        for n in model.bus_ids:
            self.variables.append(_Var(f"delta_{n}", 0.0, -INF, INF))

        for line in model.lines:
            if not availability.line_status(line.id):
                continue
            a, b = f"delta_{line.from_bus}", f"delta_{line.to_bus}"
            bk = line.susceptance
            # injection minus the flow B(δa − δb) leaving the from bus
            self._add_angle_term(line.from_bus, a, -bk)
            self._add_angle_term(line.from_bus, b, bk)
            self._add_angle_term(line.to_bus, a, bk)
            self._add_angle_term(line.to_bus, b, -bk)
            cap = Param(line.capacity)
            forward = {a: Param(bk), b: Param(-bk)}
            reverse = {a: Param(-bk), b: Param(bk)}
            for direction, flow in (("fwd", forward), ("rev", reverse)):
                self.rows.append(
                    _Row(f"{direction}_{line.id}", flow, Relation.LE, cap, -INF, 0.0)
                )

        # prices are boxed only where a GENCO asset can earn them
        box = {n: self.big_m if n in self.genco_buses else INF for n in model.bus_ids}
        balance_rows = [
            _Row(
                f"bal_{n}",
                self.balance[n],
                Relation.EQ,
                Param(block_load(model, n, self.block, year)),
                -box[n],
                box[n],
                bus=n,
            )
            for n in model.bus_ids
        ]
        pins = [
            _Row(f"pin_{n}", {f"delta_{n}": Param(1.0)}, Relation.EQ, Param(), -INF, INF)
            for n in island_pins(model, availability)
        ]
        self.rows = balance_rows + self.rows + pins
        return self


def _chi_key(chi: LinExpr) -> tuple:
    return (tuple(sorted(chi.terms.items())), chi.const)


def build_block(
    lp: LpBuilder,
    model: SystemModel,
    scenario: Scenario,
    scenario_index: int,
    block: int,
    year: int,
    u_hat: UHat,
) -> BlockHandle:
    """Emit the primal-dual block of one (scenario, block, year) into `lp`."""
    cfg = model.config
    prefix = f"s{scenario_index}b{block}y{year}"
    lower = _LowerLevel(model, scenario, block, year).describe(u_hat)
    registry = BigMRegistry()
    products: dict[tuple, LinExpr] = {}

    def product(chi: LinExpr, col: int) -> LinExpr:
        key = (_chi_key(chi), col)
        if key not in products:
            lo, hi = lp.bounds(col)
            stem = lp.col_name(col).removeprefix(prefix + "_")
            name = f"{prefix}_{stem}_{len(products)}"
            products[key] = linearize_binary_continuous(
                lp, chi, col, lo, hi, name, registry
            )
        return products[key]

    def times(param: Param, col: int) -> LinExpr:
        parts = [LinExpr.var(col, param.const)]
        parts += [product(chi, col) * coef for coef, chi in param.terms]
        return lin_sum(parts)

    by_name = {}
    for var in lower.variables:
        var.col = lp.add_col(f"{prefix}_{var.name}", var.lb, var.ub, 0.0)
        by_name[var.name] = var

    for row in lower.rows:
        row.dual = lp.add_col(f"{prefix}_y_{row.name}", row.dual_lb, row.dual_ub, 0.0)
        label = f"{prefix} {row.name}"
        if row.bus is not None and math.isfinite(row.dual_ub):
            registry.add_bound(
                ArtificialBound(
                    label, row.dual, row.dual_lb, row.dual_ub, True, True, bus=row.bus
                )
            )
        elif row.owner is not None and math.isfinite(row.dual_lb):
            chi = row.rhs.chi_total() if row.rhs.terms else LinExpr.constant(1.0)
            registry.add_bound(
                ArtificialBound(
                    label, row.dual, row.dual_lb, row.dual_ub, True, False, chi=chi
                )
            )

    for row in lower.rows:
        if row.simple:
            continue
        lhs = lin_sum(times(coef, by_name[v].col) for v, coef in row.coeffs.items())
        lhs = lhs - lin_sum(chi * coef for coef, chi in row.rhs.terms)
        lp.add_row(lhs, row.rel, row.rhs.const, f"{prefix}_{row.name}")

    # dual rows: Σ_i a_ij y_i = c_j for every lower-level variable j
    column_rows: dict[str, list[tuple[_Row, Param]]] = {
        v.name: [] for v in lower.variables
    }
    for row in lower.rows:
        for v, coef in row.coeffs.items():
            column_rows[v].append((row, coef))
    slack_pin = next((r for r in lower.rows if r.name == f"pin_{cfg.slack_bus}"), None)
    for var in lower.variables:
        terms = [times(coef, row.dual) for row, coef in column_rows[var.name]]
        if (
            cfg.literal_slack_dual
            and slack_pin is not None
            and var.name.startswith("delta_")
            and var.name != f"delta_{cfg.slack_bus}"
        ):
            terms.append(LinExpr.var(slack_pin.dual))
        lp.add_row(lin_sum(terms), Relation.EQ, var.cost, f"{prefix}_dual_{var.name}")

    rhs_dual = {row.name: times(row.rhs, row.dual) for row in lower.rows}
    primal_cost = lin_sum(LinExpr.var(v.col, v.cost) for v in lower.variables if v.cost)
    dual_objective = lin_sum(rhs_dual.values())
    lp.add_row(
        primal_cost - dual_objective, Relation.EQ, 0.0, f"{prefix}_strong_duality"
    )

    profit = -lin_sum(rhs_dual[row.name] for row in lower.rows if row.owner is not None)
    owned = [
        OwnedAsset(asset_id, by_name[var].col, cost, sites)
        for asset_id, var, cost, sites in lower.owned
    ]
    prices = {row.bus: row.dual for row in lower.rows if row.bus is not None}
    return BlockHandle(
        scenario=scenario_index,
        block=block,
        year=year,
        profit=profit,
        primal_cost=primal_cost,
        dual_objective=dual_objective,
        prices=prices,
        owned=owned,
        registry=registry,
    )


def linearize_profit_terms(handle: BlockHandle) -> LinExpr:
    """The block's linear GENCO profit in $/h.

    Existing units earn −k·P̄·φmax and existing farms −P̄·γmax; a candidate earns
    the same with its capacity-row dual multiplied by its build indicator, which
    `build_block` has already linearized.
    """
    return handle.profit
