"""Unit tests for the planning entry point and result policies."""

import pytest

from gep_planner.common.exceptions import BigMBoundError, DataValidationError
from gep_planner.planner.linearization import BigMHit
from gep_planner.planner.plan import InvestmentPlan
from gep_planner.planner.result import PlannerResult, enforce_big_m, prefer
from gep_planner.planner.solve import compare_results, plan_expansion
from gep_planner.system.config import StudyConfig

EMPTY = InvestmentPlan.empty(("C1",))
AT_N2 = InvestmentPlan(("C1",), ((2, 1),))


def _result(plan, objective, hits=()):
    return PlannerResult(
        plan=plan,
        objective=objective,
        mode="milp",
        bound=objective,
        big_m_hits=list(hits),
    )


class TestPlanExpansion:
    """Tests for plan_expansion."""

    @pytest.mark.parametrize("mode", ["oracle", "milp"])
    def test_single_mode(self, candidate_model, base_set, mode):
        # When
        result = plan_expansion(candidate_model, base_set, mode)

        # Then
        assert result.mode == mode
        assert result.plan == AT_N2
        assert result.objective == pytest.approx(40_000.0)

    def test_both_modes_agree(self, candidate_model, base_set):
        # When
        result = plan_expansion(candidate_model, base_set, "both")

        # Then
        assert result.agreement["agree"]
        assert result.agreement["same_plan"]
        assert result.plans_evaluated == 3
        assert result.summary()["buses"] == "{n2}"

    def test_unpriced_bus_without_load(self, make_triangle, make_unit, base_set):
        """The LMP above VOLL at n3 must not make the MILP infeasible."""
        # Given
        candidate = make_unit(
            "C1", None, 10.0, 20.0, candidate_buses=(2,), invest=100_000.0
        )
        model = make_triangle(candidates=(candidate,))

        # When
        result = plan_expansion(model, base_set, "both")

        # Then
        assert result.agreement["agree"]
        assert result.plan == AT_N2
        assert result.objective == pytest.approx((1_000.0 - 20.0) * 10.0 * 100.0 - 1e5)
        assert not result.big_m_hits

    def test_unknown_mode(self, candidate_model, base_set):
        with pytest.raises(DataValidationError, match="unknown planning mode 'gurobi'"):
            plan_expansion(candidate_model, base_set, "gurobi")


class TestCompareResults:
    """Tests for compare_results."""

    def test_agreement_within_tolerance(self):
        # When
        milp, oracle = _result(AT_N2, 100_000.0), _result(AT_N2, 100_000.01)
        agreement = compare_results(milp, oracle)

        # Then
        assert agreement["agree"]
        assert agreement["relative_difference"] == pytest.approx(1e-7)

    def test_different_plans_disagree(self):
        # When
        agreement = compare_results(_result(EMPTY, 5.0), _result(AT_N2, 5.0))

        # Then
        assert not agreement["same_plan"]
        assert not agreement["agree"]


class TestResultPolicies:
    """Tests for tie-breaking and the big-M policy."""

    def test_prefer(self):
        assert prefer(2.0, AT_N2, 1.0, EMPTY)
        assert not prefer(1.0, AT_N2, 1.0, EMPTY)
        assert prefer(1.0, EMPTY, 1.0 + 1e-9, AT_N2)

    def test_active_bound_fails_when_strict(self):
        # Given
        result = _result(AT_N2, 1.0, [BigMHit("s0b1y1 bal_2", 2000.0, 2000.0)])

        # When/Then
        with pytest.raises(BigMBoundError, match="raise big_m_factor above 2.0"):
            enforce_big_m(result, StudyConfig())

    def test_active_bound_warns_when_lenient(self):
        # Given
        result = _result(AT_N2, 1.0, [BigMHit("s0b1y1 bal_2", 2000.0, 2000.0)])

        # When/Then
        assert enforce_big_m(result, StudyConfig(strict_big_m=False)) is result
