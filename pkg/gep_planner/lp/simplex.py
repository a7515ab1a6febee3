"""
Bounded-variable revised simplex.

Rows are turned into equalities with one slack per row (≤: s ≥ 0, ≥: s ≤ 0,
=: s = 0). Rows whose slack cannot absorb the starting residual get an
artificial column, and phase 1 minimizes the sum of artificials. The basis inverse
is kept dense and updated with eta transformations, then recomputed from scratch
every `refactor_every` pivots.

Pricing is largest reduced cost (Dantzig) until `stall_window` pivots pass without
objective progress, then Bland's smallest-index rule until progress resumes. The
ratio test is the two-pass Harris test; Bland mode uses the textbook minimum ratio
with smallest-index ties. Nonbasic variables with two finite bounds may flip
between them without a basis change.
"""

import math
from typing import Optional

import numpy as np
import numpy.typing as npt

from gep_planner.common.exceptions import LpNumericalError, ModelSizeError
from gep_planner.common.logging_config import setup_logger
from gep_planner.lp.problem import LinearProgram, LpSolution, LpStatus, Relation, Sense
from gep_planner.system.config import SolverTolerances

# Configure logging
log = setup_logger(__name__)

AT_LOWER = 0
AT_UPPER = 1
AT_ZERO = 2  # free nonbasic variable parked at 0
BASIC = -1

FloatArray = npt.NDArray[np.float64]


class RevisedSimplex:
    """One solve of one LinearProgram; not reusable."""

    def __init__(
        self,
        problem: LinearProgram,
        tolerances: Optional[SolverTolerances] = None,
        max_dense_bytes: Optional[int] = None,
    ):
        self.problem = problem
        self.tol = tolerances or SolverTolerances()
        m, n = problem.A.shape
        if max_dense_bytes is not None and 8 * m * (n + 2 * m) > max_dense_bytes:
            raise ModelSizeError(
                f"dense LP of {m} rows × {n} columns exceeds the memory budget "
                f"of {max_dense_bytes} bytes"
            )
        self.m = m
        self.n = n
        self.sign = 1.0 if problem.sense is Sense.MIN else -1.0
        self.iterations = 0
        self._pivots_since_refactor = 0

        # structurals | slacks | artificials (added by _initial_basis)
        self.M = np.hstack([problem.A.toarray(), np.eye(m)])
        relations = problem.relations
        slack_lb = np.array([-math.inf if r is Relation.GE else 0.0 for r in relations])
        slack_ub = np.array([math.inf if r is Relation.LE else 0.0 for r in relations])
        self.lb = np.concatenate([problem.lb, slack_lb])
        self.ub = np.concatenate([problem.ub, slack_ub])
        self.cost = np.concatenate([self.sign * problem.c, np.zeros(m)])
        self.b = problem.b.astype(float)

        self.x = np.zeros(n + m)
        self.pos = np.full(n + m, BASIC, dtype=int)
        self.basis = np.zeros(m, dtype=int)
        self.Binv = np.eye(m)
        self.n_artificial = 0

    # ------------------------------------------------------------------ setup

    def _park_nonbasic(self, j: int, value: Optional[float] = None) -> None:
        lb, ub = self.lb[j], self.ub[j]
        if value is not None and math.isfinite(ub) and value >= ub:
            self.pos[j], self.x[j] = AT_UPPER, ub
        elif math.isfinite(lb):
            self.pos[j], self.x[j] = AT_LOWER, lb
        elif math.isfinite(ub):
            self.pos[j], self.x[j] = AT_UPPER, ub
        else:
            self.pos[j], self.x[j] = AT_ZERO, 0.0

    def _initial_basis(self) -> None:
        n, m = self.n, self.m
        for j in range(n):
            self._park_nonbasic(j)
        residual = self.b - self.M[:, :n] @ self.x[:n]

        artificial_cols = []
        signs = np.ones(m)
        for i in range(m):
            s = n + i
            lo, hi = self.lb[s], self.ub[s]
            if lo - self.tol.feas_tol <= residual[i] <= hi + self.tol.feas_tol:
                self.basis[i] = s
                self.pos[s] = BASIC
                self.x[s] = residual[i]
                continue
            clipped = min(max(residual[i], lo), hi)
            self._park_nonbasic(s, clipped)
            gap = residual[i] - self.x[s]
            sign = 1.0 if gap > 0 else -1.0
            column = np.zeros(m)
            column[i] = sign
            artificial_cols.append((i, column, abs(gap)))
            signs[i] = sign

        if artificial_cols:
            k = len(artificial_cols)
            columns = np.column_stack([c for _, c, _ in artificial_cols])
            self.M = np.hstack([self.M, columns])
            self.lb = np.concatenate([self.lb, np.zeros(k)])
            self.ub = np.concatenate([self.ub, np.full(k, math.inf)])
            self.cost = np.concatenate([self.cost, np.zeros(k)])
            self.x = np.concatenate([self.x, np.zeros(k)])
            self.pos = np.concatenate([self.pos, np.full(k, BASIC, dtype=int)])
            for a, (i, _, value) in enumerate(artificial_cols):
                j = n + m + a
                self.basis[i] = j
                self.x[j] = value
            self.n_artificial = k
        # basis columns are ±unit vectors
        self.Binv = np.diag(signs)

    # -------------------------------------------------------------- kernels

    def _refactor(self) -> None:
        B = self.M[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as e:
            raise LpNumericalError(
                f"singular basis after {self.iterations} pivots"
            ) from e
        condition = np.linalg.norm(B, 1) * np.linalg.norm(self.Binv, 1)
        if not math.isfinite(condition) or condition > self.tol.max_condition:
            log.warning(
                f"Basis condition estimate {condition:.3g} after refactorization"
            )
            raise LpNumericalError(
                f"basis condition estimate {condition:.3g} exceeds "
                f"{self.tol.max_condition:.3g}"
            )
        nonbasic = self.x.copy()
        nonbasic[self.basis] = 0.0
        self.x[self.basis] = self.Binv @ (self.b - self.M @ nonbasic)
        self._pivots_since_refactor = 0
        log.debug(
            f"Refactorized basis at pivot {self.iterations} (cond≈{condition:.2e})"
        )

    def _duals(self, cost: FloatArray) -> FloatArray:
        return cost[self.basis] @ self.Binv

    def _choose_entering(
        self, d: FloatArray, dual_tol: float, bland: bool
    ) -> tuple[int, float]:
        movable = self.lb < self.ub
        pos = self.pos
        can_inc = movable & ((pos == AT_LOWER) | (pos == AT_ZERO)) & (d < -dual_tol)
        can_dec = movable & ((pos == AT_UPPER) | (pos == AT_ZERO)) & (d > dual_tol)
        eligible = can_inc | can_dec
        if not eligible.any():
            return -1, 0.0
        if bland:
            j = int(np.flatnonzero(eligible)[0])
        else:
            j = int(np.argmax(np.where(eligible, np.abs(d), -1.0)))
        return j, (1.0 if can_inc[j] else -1.0)

    def _ratio_test(self, delta: FloatArray, bland: bool) -> tuple[int, float]:
        """Leaving row and step for basic changes `delta` per unit step (−1 if none)."""
        ptol = self.tol.pivot_tol
        ftol = self.tol.feas_tol
        xb = self.x[self.basis]
        lb = self.lb[self.basis]
        ub = self.ub[self.basis]

        dec = delta < -ptol
        inc = delta > ptol
        ratio = np.full(self.m, math.inf)
        relaxed = np.full(self.m, math.inf)
        with np.errstate(invalid="ignore"):
            lim = dec & np.isfinite(lb)
            ratio[lim] = (xb[lim] - lb[lim]) / -delta[lim]
            relaxed[lim] = (xb[lim] - lb[lim] + ftol) / -delta[lim]
            lim = inc & np.isfinite(ub)
            ratio[lim] = (ub[lim] - xb[lim]) / delta[lim]
            relaxed[lim] = (ub[lim] - xb[lim] + ftol) / delta[lim]

        if not np.isfinite(ratio).any():
            return -1, math.inf

        if bland:
            best = float(np.min(ratio))
            ties = np.flatnonzero(ratio <= best + ptol)
            r = int(ties[np.argmin(self.basis[ties])])
        else:
            theta = float(np.min(relaxed))
            candidates = np.flatnonzero(ratio <= theta)
            if candidates.size == 0:
                candidates = np.array([int(np.argmin(ratio))])
            r = int(candidates[np.argmax(np.abs(delta[candidates]))])
        return r, max(float(ratio[r]), 0.0)

    def _pivot(self, r: int, j: int, alpha: FloatArray) -> None:
        pivot_row = self.Binv[r] / alpha[r]
        self.Binv -= np.outer(alpha, pivot_row)
        self.Binv[r] = pivot_row
        self.basis[r] = j
        self.pos[j] = BASIC
        self._pivots_since_refactor += 1

    # ------------------------------------------------------------------ loop

    def _run_phase(self, cost: FloatArray, phase: int) -> LpStatus:
        dual_tol = self.tol.feas_tol * max(1.0, float(np.max(np.abs(cost), initial=0.0)))
        bland = False
        stall = 0
        best = float(cost @ self.x)
        confirmed = False

        while True:
            if self.iterations >= self.tol.max_iterations:
                raise LpNumericalError(
                    f"simplex iteration limit {self.tol.max_iterations} reached"
                )
            if self._pivots_since_refactor >= self.tol.refactor_every:
                self._refactor()

            y = self._duals(cost)
            d = cost - y @ self.M
            d[self.basis] = 0.0
            j, direction = self._choose_entering(d, dual_tol, bland)
            if j < 0:
                if confirmed or self._pivots_since_refactor == 0:
                    return LpStatus.OPTIMAL
                # recompute from a fresh factorization before declaring optimality
                self._refactor()
                confirmed = True
                continue
            confirmed = False

            alpha = self.Binv @ self.M[:, j]
            delta = -direction * alpha
            r, step = self._ratio_test(delta, bland)
            flip = self.ub[j] - self.lb[j]

            self.iterations += 1
            if math.isfinite(flip) and (r < 0 or flip <= step):
                self.x[j] += direction * flip
                self.x[self.basis] += delta * flip
                self.pos[j] = AT_UPPER if direction > 0 else AT_LOWER
            elif r < 0:
                ray = self.problem.col_name(j) if j < self.n else j
                log.debug(f"Phase {phase}: unbounded ray along {ray}")
                return LpStatus.UNBOUNDED
            else:
                leaving = int(self.basis[r])
                self.x[j] += direction * step
                self.x[self.basis] += delta * step
                hit_upper = delta[r] > 0
                self.x[leaving] = self.ub[leaving] if hit_upper else self.lb[leaving]
                self._pivot(r, j, alpha)
                self.pos[leaving] = AT_UPPER if hit_upper else AT_LOWER

            objective = float(cost @ self.x)
            if objective < best - 1e-12 * (1.0 + abs(best)):
                best = objective
                stall = 0
                if bland:
                    log.debug(f"Phase {phase}: progress resumed, leaving Bland's rule")
                bland = False
            else:
                stall += 1
                if stall >= self.tol.stall_window and not bland:
                    log.debug(
                        f"Phase {phase}: {stall} pivots without progress, "
                        "switching to Bland's rule"
                    )
                    bland = True

    def solve(self) -> LpSolution:
        self._initial_basis()
        n, m = self.n, self.m

        if self.n_artificial:
            phase1 = np.zeros_like(self.cost)
            phase1[n + m :] = 1.0
            status = self._run_phase(phase1, phase=1)
            if status is not LpStatus.OPTIMAL:
                raise LpNumericalError("phase 1 cannot be unbounded")
            infeasibility = float(np.sum(self.x[n + m :]))
            scale = max(1.0, float(np.max(np.abs(self.b), initial=0.0)))
            if infeasibility > 10 * self.tol.feas_tol * scale:
                log.debug(f"Phase 1 ended with infeasibility {infeasibility:.3g}")
                return LpSolution(LpStatus.INFEASIBLE, iterations=self.iterations)
            # artificials stay at zero from now on
            self.ub[n + m :] = 0.0
            for j in range(n + m, n + m + self.n_artificial):
                if self.pos[j] != BASIC:
                    self.pos[j], self.x[j] = AT_LOWER, 0.0

        status = self._run_phase(self.cost, phase=2)
        if status is not LpStatus.OPTIMAL:
            return LpSolution(status, iterations=self.iterations)
        return self._solution()

    def _solution(self) -> LpSolution:
        n = self.n
        problem = self.problem
        y = self._duals(self.cost)
        d = self.cost[:n] - y @ self.M[:, :n]
        basic = np.zeros(len(self.x), dtype=bool)
        basic[self.basis] = True
        d[basic[:n]] = 0.0

        x = self.x[:n].copy()
        # snap nonbasic structurals exactly onto their bounds
        nonbasic = ~basic[:n]
        x[nonbasic] = np.clip(x[nonbasic], problem.lb[nonbasic], problem.ub[nonbasic])

        cost_scale = float(np.max(np.abs(self.cost), initial=0.0))
        dual_tol = self.tol.feas_tol * max(1.0, cost_scale)
        bound_terms = 0.0
        for j in np.flatnonzero(np.abs(d) > 0):
            bound = problem.lb[j] if d[j] > 0 else problem.ub[j]
            if math.isfinite(bound):
                bound_terms += d[j] * bound
            elif abs(d[j]) > dual_tol:
                bound_terms += d[j] * x[j]
        dual_min = float(self.b @ y) + bound_terms

        return LpSolution(
            status=LpStatus.OPTIMAL,
            x=x,
            duals=self.sign * y,
            reduced_costs=self.sign * d,
            objective=problem.objective_value(x),
            dual_objective=self.sign * dual_min + problem.offset,
            iterations=self.iterations,
        )


def solve_lp(
    problem: LinearProgram,
    tolerances: Optional[SolverTolerances] = None,
    max_dense_bytes: Optional[int] = None,
) -> LpSolution:
    """Solve a LinearProgram with the bounded revised simplex.

    Returns:
        LpSolution whose status is optimal, infeasible or unbounded. On optimal
        status `duals[i]` is the derivative of the optimal objective with respect to
        `b[i]` and `reduced_costs[j]` that with respect to the active bound of x_j.

    Raises:
        LpNumericalError: If the basis becomes too ill-conditioned.
        ModelSizeError: If the dense working matrix would exceed `max_dense_bytes`.
    """
    solution = RevisedSimplex(problem, tolerances, max_dense_bytes).solve()
    log.debug(
        f"Solved {problem.n_rows}×{problem.n_cols} LP: {solution.status.value} "
        f"in {solution.iterations} iterations"
    )
    return solution
