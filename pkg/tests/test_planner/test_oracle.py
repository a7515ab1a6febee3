"""Unit tests for fixed-plan evaluation and the enumeration oracle."""

import pytest

from gep_planner.market.clearing import clear_grid
from gep_planner.market.profit import expected_discounted_profit
from gep_planner.planner.oracle import enumerate_oracle, evaluate_plan, solve_fixed_block
from gep_planner.planner.plan import InvestmentPlan
from gep_planner.planner.result import TRACE_COLUMNS

AT_N1 = InvestmentPlan(("C1",), ((1, 1),))
AT_N2 = InvestmentPlan(("C1",), ((2, 1),))


class TestSolveFixedBlock:
    """Tests for solve_fixed_block."""

    def test_block_quantities(self, candidate_model, base_set):
        # When
        outcome = solve_fixed_block(candidate_model, base_set, 0, 1, 1, AT_N2)

        # Then
        assert outcome.profit == pytest.approx(25.0 * 20.0)
        assert outcome.raw_profit == pytest.approx(outcome.profit)
        expected = 60.0 * 10.0 + 20.0 * 5.0 + 20.0 * 30.0
        assert outcome.primal_cost == pytest.approx(expected)
        assert outcome.dual_objective == pytest.approx(outcome.primal_cost)
        assert outcome.big_m_hits == ()


class TestEvaluatePlan:
    """Tests for evaluate_plan."""

    @pytest.mark.parametrize(
        "plan, expected",
        [
            (InvestmentPlan.empty(("C1",)), 0.0),
            (AT_N1, 0.0),
            (AT_N2, 40_000.0),
        ],
    )
    def test_plan_values(self, candidate_model, base_set, plan, expected):
        # When
        result = evaluate_plan(candidate_model, base_set, plan)

        # Then
        assert result.objective == pytest.approx(expected, abs=1e-6)
        assert result.mode == "oracle"
        assert list(result.trace.columns) == list(TRACE_COLUMNS)

    def test_matches_market_clearing(self, candidate_model, base_set):
        """With unique prices the optimistic profit equals the cleared profit."""
        # When
        oracle = evaluate_plan(candidate_model, base_set, AT_N2)
        cleared = clear_grid(candidate_model, base_set, AT_N2)

        # Then
        expected = expected_discounted_profit(cleared, AT_N2, candidate_model, base_set)
        assert oracle.objective == pytest.approx(expected)

    def test_cache_is_filled_once_per_build(self, candidate_model, base_set):
        # Given
        cache = {}

        # When
        evaluate_plan(candidate_model, base_set, AT_N2, cache)
        again = evaluate_plan(candidate_model, base_set, AT_N2, cache)

        # Then
        assert len(cache) == 1
        assert again.objective == pytest.approx(40_000.0)


class TestEnumerateOracle:
    """Tests for enumerate_oracle."""

    def test_best_plan(self, candidate_model, base_set):
        # When
        result = enumerate_oracle(candidate_model, base_set)

        # Then
        assert result.plan.builds == {"C1": (2, 1)}
        assert result.objective == pytest.approx(40_000.0)
        assert result.plans_evaluated == 3
        assert result.trace["profit ($/h)"].tolist() == pytest.approx([500.0])

    def test_ties_go_to_empty_plan(self, make_two_bus, make_unit, base_set):
        """A candidate that only recovers its cost ties with building nothing."""
        # Given
        model = make_two_bus(
            candidates=(
                make_unit("C1", None, 20.0, 5.0, candidate_buses=(1,), invest=10_000.0),
            )
        )

        # When
        result = enumerate_oracle(model, base_set)

        # Then
        assert result.plan.builds == {}
        assert result.objective == pytest.approx(0.0, abs=1e-6)
        assert result.plans_evaluated == 2

    def test_multi_year_build_timing(self, make_two_bus, make_unit, base_set):
        """Building late saves a year of payments but loses a year of rent."""
        # Given
        model = make_two_bus(
            candidates=(
                make_unit("C1", None, 20.0, 5.0, candidate_buses=(2,), invest=10_000.0),
            ),
            years=2,
        )

        # When
        result = enumerate_oracle(model, base_set)

        # Then
        assert result.plan.builds == {"C1": (2, 1)}
        assert result.objective == pytest.approx(2 * 40_000.0)
        assert result.plans_evaluated == 3
