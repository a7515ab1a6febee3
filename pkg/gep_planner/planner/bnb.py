"""
Best-first branch-and-bound over the investment binaries.

Node relaxations are the MILP's LP with some binaries fixed through column bounds.
Open nodes are ordered by relaxation bound, deeper nodes first on equal bounds, then
by creation order, and are solved in batches of `threads` nodes. Among plans whose
objectives tie the smallest `InvestmentPlan.sort_key` wins, so subtrees whose bound
ties the incumbent are still explored.
"""

import heapq
import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gep_planner.common.exceptions import ModelingError
from gep_planner.common.logging_config import setup_logger
from gep_planner.lp.problem import LpSolution, LpStatus
from gep_planner.lp.simplex import solve_lp
from gep_planner.planner.milp import MilpModel
from gep_planner.planner.plan import InvestmentPlan
from gep_planner.planner.result import PlannerResult, prefer, tie_tolerance, trace_frame

# Configure logging
log = setup_logger(__name__)

Fixing = dict[int, tuple[float, float]]


@dataclass(frozen=True)
class _Node:
    bound: float
    depth: int
    fixing: tuple[tuple[int, float], ...]

    def overrides(self) -> Fixing:
        return {col: (value, value) for col, value in self.fixing}


@dataclass
class _Incumbent:
    value: float
    plan: InvestmentPlan
    x: np.ndarray


def _solve_node(milp: MilpModel, fixing: Fixing) -> LpSolution:
    cfg = milp.model.config
    return solve_lp(milp.lp.with_bounds(fixing), cfg.tolerances, cfg.max_dense_bytes)


def _fractional(milp: MilpModel, x: np.ndarray, tol: float) -> list[tuple[float, int]]:
    """(distance to 0.5, column) of every binary that is not integral at x."""
    out = []
    for col in milp.binaries:
        frac = x[col] - math.floor(x[col])
        if tol < frac < 1.0 - tol:
            out.append((abs(frac - 0.5), col))
    return out


def _gap(bound: float, value: float) -> float:
    return max(0.0, (bound - value) / max(abs(value), 1.0))


def _result(
    milp: MilpModel,
    incumbent: _Incumbent,
    bound: float,
    nodes: int,
    start: float,
    timed_out: bool,
) -> PlannerResult:
    x = incumbent.x
    tol = milp.model.config.tolerances.integrality_tol
    hits = [
        hit
        for handle in milp.handles
        for hit in handle.registry.check(x, handle.dispatch_buses(x), tol)
    ]
    trace = trace_frame(
        milp.model,
        milp.scenarios,
        ((h.scenario, h.block, h.year, h.profit.value(x)) for h in milp.handles),
    )
    return PlannerResult(
        plan=incumbent.plan,
        objective=incumbent.value,
        mode="milp",
        bound=bound,
        gap=_gap(bound, incumbent.value),
        nodes=nodes,
        trace=trace,
        big_m_hits=hits,
        elapsed=time.monotonic() - start,
        timed_out=timed_out,
    )


def solve_bnb(
    milp: MilpModel,
    gap: Optional[float] = None,
    time_limit: Optional[float] = None,
    threads: Optional[int] = None,
) -> PlannerResult:
    """Solve the MILP to the relative `gap`, or return the incumbent at `time_limit`.

    Defaults come from the model's StudyConfig (`mip_gap`, `time_limit`,
    `threads`).

    Raises:
        ModelingError: If the all-zero plan or a node relaxation is infeasible where
            it cannot be, or a relaxation is unbounded.
    """
    cfg = milp.model.config
    gap = cfg.mip_gap if gap is None else gap
    time_limit = cfg.time_limit if time_limit is None else time_limit
    threads = threads or cfg.threads
    tol = cfg.tolerances.integrality_tol
    start = time.monotonic()

    empty = InvestmentPlan.empty(milp.space.ids)
    zero = _solve_node(milp, milp.fixing(empty))
    if not zero.is_optimal:
        raise ModelingError(f"the no-investment plan is {zero.status.value}")
    incumbent = _Incumbent(zero.objective, empty, zero.x)
    log.debug(f"Initial incumbent (no investment): {zero.objective:,.2f} $")

    seq = itertools.count()
    heap: list[tuple[float, int, int, _Node]] = []

    def push(node: _Node) -> None:
        heapq.heappush(heap, (-node.bound, -node.depth, next(seq), node))

    push(_Node(math.inf, 0, ()))
    nodes = 0
    pruned_bound = -math.inf
    timed_out = False

    def dominated(bound: float) -> bool:
        nonlocal pruned_bound
        if bound < incumbent.value - tie_tolerance(incumbent.value):
            return True
        if gap > 0 and bound <= incumbent.value + gap * max(abs(incumbent.value), 1.0):
            pruned_bound = max(pruned_bound, bound)
            return True
        return False

    with ThreadPoolExecutor(max_workers=threads) as pool:
        while heap:
            if time_limit is not None and time.monotonic() - start > time_limit:
                timed_out = True
                log.warning(f"Branch-and-bound hit the {time_limit}s time limit")
                break
            batch = []
            while heap and len(batch) < threads:
                node = heapq.heappop(heap)[-1]
                if not dominated(node.bound):
                    batch.append(node)
            if not batch:
                break
            solutions = list(pool.map(lambda n: _solve_node(milp, n.overrides()), batch))
            nodes += len(batch)

            for node, solution in zip(batch, solutions):
                if solution.status is LpStatus.INFEASIBLE:
                    if not node.fixing:
                        raise ModelingError("root relaxation is infeasible")
                    continue
                if solution.status is LpStatus.UNBOUNDED:
                    raise ModelingError("node relaxation is unbounded")
                bound = min(solution.objective, node.bound)
                if dominated(bound):
                    continue

                x = solution.x
                fractional = _fractional(milp, x, tol)
                fixed = {col for col, _ in node.fixing}
                if not fractional:
                    plan = milp.plan_from(x)
                    if prefer(solution.objective, plan, incumbent.value, incumbent.plan):
                        incumbent = _Incumbent(solution.objective, plan, x)
                        log.debug(
                            f"Incumbent {plan.label(cfg.years)}: "
                            f"{solution.objective:,.2f} $ after {nodes} nodes"
                        )
                    free = [col for col in milp.binaries if col not in fixed]
                    if not free:
                        continue
                    col = free[0]
                else:
                    col = min(fractional)[1]

                for value in (1.0, 0.0):
                    push(_Node(bound, node.depth + 1, (*node.fixing, (col, value))))

    open_bound = -math.inf
    if timed_out:
        open_bound = max((-key[0] for key in heap), default=-math.inf)
    bound = max(incumbent.value, pruned_bound, open_bound)
    result = _result(milp, incumbent, bound, nodes, start, timed_out)
    log.info(
        f"Branch-and-bound: {nodes} nodes in {result.elapsed:.1f}s, best "
        f"{incumbent.plan.label(cfg.years)} at {result.objective_musd:.4f} $M, "
        f"gap {result.gap:.2e}"
    )
    return result
