"""
Optimality certificates for solved linear programs.

`check_kkt` recomputes every Karush-Kuhn-Tucker residual of an optimal
`LpSolution` from the problem data alone, so a solve can be audited without
trusting the solver's own bookkeeping. Max problems are checked in their
equivalent min form (objective, duals and reduced costs negated).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gep_planner.common.exceptions import ModelingError
from gep_planner.lp.problem import LinearProgram, LpSolution, Relation, Sense
from gep_planner.system.config import SolverTolerances


@dataclass(frozen=True)
class KktReport:
    """Largest residual of each optimality condition.

    Attributes:
        primal: Largest row or bound violation of x.
        dual_sign: Largest wrong-signed dual or reduced cost.
        stationarity: max |c − Aᵀy − d| over the columns.
        complementarity: Largest |dual × slack| product, rows and bounds.
        duality_gap: |primal objective − dual objective|.
        scale: 1 + largest magnitude among b, c and the objective, used to
            normalize the tolerances in `passed`.
    """

    primal: float
    dual_sign: float
    stationarity: float
    complementarity: float
    duality_gap: float
    objective: float
    scale: float

    def passed(self, tolerances: Optional[SolverTolerances] = None) -> bool:
        tol = tolerances or SolverTolerances()
        return (
            self.primal <= tol.feas_tol * self.scale
            and self.dual_sign <= tol.feas_tol * self.scale
            and self.stationarity <= tol.feas_tol * self.scale
            and self.complementarity <= tol.comp_tol * self.scale
            and self.duality_gap <= tol.duality_tol * (1.0 + abs(self.objective))
        )

    def as_dict(self) -> dict[str, float]:
        return {
            "primal": self.primal,
            "dual_sign": self.dual_sign,
            "stationarity": self.stationarity,
            "complementarity": self.complementarity,
            "duality_gap": self.duality_gap,
        }


def _row_violation(activity: np.ndarray, problem: LinearProgram) -> np.ndarray:
    gap = activity - problem.b
    out = np.zeros_like(gap)
    for i, rel in enumerate(problem.relations):
        if rel is Relation.LE:
            out[i] = max(gap[i], 0.0)
        elif rel is Relation.GE:
            out[i] = max(-gap[i], 0.0)
        else:
            out[i] = abs(gap[i])
    return out


def check_kkt(problem: LinearProgram, solution: LpSolution) -> KktReport:
    """Recompute primal, dual, stationarity, complementarity and gap residuals.

    Raises:
        ModelingError: If the solution is not optimal.
    """
    if not solution.is_optimal:
        raise ModelingError(
            f"KKT check needs an optimal solution, got {solution.status}"
        )

    sign = 1.0 if problem.sense is Sense.MIN else -1.0
    c = sign * problem.c
    y = sign * solution.duals
    d = sign * solution.reduced_costs
    x = solution.x

    activity = problem.A @ x
    primal = float(
        max(
            np.max(_row_violation(activity, problem), initial=0.0),
            np.max(problem.lb - x, initial=0.0),
            np.max(x - problem.ub, initial=0.0),
        )
    )

    # y ≤ 0 on ≤ rows, y ≥ 0 on ≥ rows; d > 0 needs a finite lower bound
    dual_sign = 0.0
    comp = 0.0
    slack = problem.b - activity
    for i, rel in enumerate(problem.relations):
        if rel is Relation.LE:
            dual_sign = max(dual_sign, y[i])
        elif rel is Relation.GE:
            dual_sign = max(dual_sign, -y[i])
        if rel is not Relation.EQ:
            comp = max(comp, abs(y[i] * slack[i]))
    for j in range(problem.n_cols):
        if d[j] > 0:
            if math.isinf(problem.lb[j]):
                dual_sign = max(dual_sign, d[j])
            else:
                comp = max(comp, d[j] * (x[j] - problem.lb[j]))
        elif d[j] < 0:
            if math.isinf(problem.ub[j]):
                dual_sign = max(dual_sign, -d[j])
            else:
                comp = max(comp, -d[j] * (problem.ub[j] - x[j]))

    stationarity = float(np.max(np.abs(c - problem.A.T @ y - d), initial=0.0))
    scale = 1.0 + max(
        float(np.max(np.abs(problem.b), initial=0.0)),
        float(np.max(np.abs(problem.c), initial=0.0)),
    )
    return KktReport(
        primal=primal,
        dual_sign=float(dual_sign),
        stationarity=stationarity,
        complementarity=float(comp),
        duality_gap=abs(solution.objective - solution.dual_objective),
        objective=solution.objective,
        scale=scale,
    )
