"""Unit tests for the bounded revised simplex."""

import math

import numpy as np
import pytest
from scipy.optimize import linprog

from gep_planner.common.exceptions import DataValidationError, ModelSizeError
from gep_planner.lp.kkt import check_kkt
from gep_planner.lp.problem import LinExpr, LpBuilder, LpStatus, Relation, Sense
from gep_planner.lp.simplex import solve_lp


def _two_row_lp(sense: Sense):
    """min/max (−x − y or x + y) s.t. x + 2y ≤ 4, 3x + y ≤ 6, x, y ≥ 0."""
    lp = LpBuilder("two_rows")
    sign = -1.0 if sense is Sense.MIN else 1.0
    x = lp.add_col("x", obj=sign)
    y = lp.add_col("y", obj=sign)
    lp.add_row(LinExpr({x: 1.0, y: 2.0}), Relation.LE, 4.0, "r1")
    lp.add_row(LinExpr({x: 3.0, y: 1.0}), Relation.LE, 6.0, "r2")
    return lp.build(sense)


def _random_lp(seed: int):
    """Feasible, bounded LP with mixed rows and boxed or half-bounded columns."""
    rng = np.random.default_rng(seed)
    m, n = 6, 8
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0.0, 1.0, size=n)
    lp = LpBuilder(f"random_{seed}")
    cols = [
        lp.add_col(f"x{j}", -1.0 if j % 3 == 0 else 0.0, 2.0, float(rng.normal()))
        for j in range(n)
    ]
    relations = [Relation.LE, Relation.GE, Relation.EQ]
    for i in range(m):
        rel = relations[i % 3]
        activity = float(A[i] @ x0)
        margin = {Relation.LE: 0.5, Relation.GE: -0.5}.get(rel, 0.0)
        rhs = activity + margin
        lp.add_row(LinExpr(dict(zip(cols, A[i]))), rel, rhs, f"r{i}")
    return lp.build(Sense.MIN)


def _linprog(problem):
    A = problem.A.toarray()
    le = [i for i, r in enumerate(problem.relations) if r is Relation.LE]
    ge = [i for i, r in enumerate(problem.relations) if r is Relation.GE]
    eq = [i for i, r in enumerate(problem.relations) if r is Relation.EQ]
    A_ub = np.vstack([A[le], -A[ge]])
    b_ub = np.concatenate([problem.b[le], -problem.b[ge]])
    return linprog(
        problem.c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A[eq],
        b_eq=problem.b[eq],
        bounds=list(zip(problem.lb, problem.ub)),
        method="highs",
    )


class TestSolveLp:
    """Tests for solve_lp."""

    def test_min_vertex_and_duals(self):
        # When
        solution = solve_lp(_two_row_lp(Sense.MIN))

        # Then
        assert solution.status is LpStatus.OPTIMAL
        assert solution.x == pytest.approx([1.6, 1.2])
        assert solution.objective == pytest.approx(-2.8)
        assert solution.duals == pytest.approx([-0.4, -0.2])
        assert solution.dual_objective == pytest.approx(-2.8)

    def test_max_duals_are_objective_derivatives(self):
        # When
        solution = solve_lp(_two_row_lp(Sense.MAX))

        # Then
        assert solution.objective == pytest.approx(2.8)
        assert solution.duals == pytest.approx([0.4, 0.2])

    def test_free_column_and_equality(self):
        """min x s.t. x − y = 0, y ≥ 2 with x free: both duals are one."""
        # Given
        lp = LpBuilder("free")
        x = lp.add_col("x", -math.inf, math.inf, 1.0)
        y = lp.add_col("y", -math.inf, math.inf)
        lp.add_row(LinExpr({x: 1.0, y: -1.0}), Relation.EQ, 0.0, "link")
        lp.add_row(LinExpr.var(y), Relation.GE, 2.0, "floor")
        problem = lp.build(Sense.MIN)

        # When
        solution = solve_lp(problem)

        # Then
        assert solution.x == pytest.approx([2.0, 2.0])
        assert solution.duals == pytest.approx([1.0, 1.0])
        assert check_kkt(problem, solution).passed()

    def test_upper_bounds_and_reduced_costs(self):
        """max 3x + y with x ≤ 1, y ≤ 5 and x + y ≤ 4."""
        # Given
        lp = LpBuilder("boxed")
        x = lp.add_col("x", 0.0, 1.0, 3.0)
        y = lp.add_col("y", 0.0, 5.0, 1.0)
        lp.add_row(LinExpr({x: 1.0, y: 1.0}), Relation.LE, 4.0, "cap")
        problem = lp.build(Sense.MAX)

        # When
        solution = solve_lp(problem)

        # Then
        assert solution.x == pytest.approx([1.0, 3.0])
        assert solution.objective == pytest.approx(6.0)
        assert solution.duals == pytest.approx([1.0])
        assert solution.reduced_costs == pytest.approx([2.0, 0.0])

    def test_objective_offset(self):
        # Given
        lp = LpBuilder("offset")
        x = lp.add_col("x", 1.0, 2.0)
        lp.add_row(LinExpr.var(x), Relation.LE, 5.0, "cap")
        lp.add_objective(LinExpr({x: 2.0}, const=10.0))

        # When
        solution = solve_lp(lp.build(Sense.MIN))

        # Then
        assert solution.objective == pytest.approx(12.0)
        assert solution.dual_objective == pytest.approx(12.0)

    def test_infeasible(self):
        # Given
        lp = LpBuilder("infeasible")
        x = lp.add_col("x", 0.0, 0.5, 1.0)
        lp.add_row(LinExpr.var(x), Relation.GE, 1.0, "floor")

        # When/Then
        assert solve_lp(lp.build(Sense.MIN)).status is LpStatus.INFEASIBLE

    def test_unbounded(self):
        # Given
        lp = LpBuilder("unbounded")
        x = lp.add_col("x", obj=-1.0)
        y = lp.add_col("y")
        lp.add_row(LinExpr({x: 1.0, y: -1.0}), Relation.LE, 1.0, "r")

        # When/Then
        assert solve_lp(lp.build(Sense.MIN)).status is LpStatus.UNBOUNDED

    def test_memory_budget(self):
        with pytest.raises(ModelSizeError, match="memory budget"):
            solve_lp(_two_row_lp(Sense.MIN), max_dense_bytes=10)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_highs(self, seed):
        """Objective agrees with HiGHS and the solution passes the KKT audit."""
        # Given
        problem = _random_lp(seed)

        # When
        solution = solve_lp(problem)
        reference = _linprog(problem)

        # Then
        assert reference.status == 0
        assert solution.is_optimal
        assert solution.objective == pytest.approx(reference.fun, rel=1e-7, abs=1e-7)
        assert check_kkt(problem, solution).passed()


class TestLinearProgram:
    """Tests for LinearProgram construction."""

    def test_reversed_bounds(self):
        # Given
        lp = LpBuilder("bad")
        lp.add_col("x", 1.0, 0.0)

        # When/Then
        with pytest.raises(DataValidationError, match="lower bound above upper bound"):
            lp.build(Sense.MIN)

    def test_with_bounds_copies(self):
        # Given
        problem = _two_row_lp(Sense.MIN)

        # When
        fixed = problem.with_bounds({0: (1.0, 1.0)})

        # Then
        assert fixed.lb[0] == 1.0
        assert problem.lb[0] == 0.0
        assert solve_lp(fixed).x == pytest.approx([1.0, 1.5])

    def test_constant_moves_to_rhs(self):
        # Given
        lp = LpBuilder("const")
        x = lp.add_col("x")
        lp.add_row(LinExpr({x: 1.0}, const=3.0), Relation.LE, 5.0, "r")

        # When
        problem = lp.build(Sense.MIN)

        # Then
        assert problem.b.tolist() == [2.0]
