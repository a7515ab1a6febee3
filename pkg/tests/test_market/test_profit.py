"""Unit tests for GENCO profit accounting."""

import pytest

from gep_planner.common.exceptions import GridIncompleteError
from gep_planner.market.clearing import ClearingProblem, clear_grid, clear_market
from gep_planner.market.profit import (
    expected_discounted_profit,
    invest_cost,
    profit_trace,
    scenario_profit,
)
from gep_planner.planner.plan import InvestmentPlan
from gep_planner.scenarios.availability import enumerate_n_minus_1


class TestScenarioProfit:
    """Tests for scenario_profit."""

    def test_scarcity_rent(self, make_two_bus, base_set):
        # Given
        model = make_two_bus(line_cap=60.0, g2_cap=30.0)

        # When
        result = clear_market(ClearingProblem(model, base_set[0], 1, 1))

        # Then
        assert scenario_profit(result, model) == pytest.approx(970.0 * 30.0)

    def test_rival_units_earn_nothing(self, make_two_bus, base_set):
        """G1 earns congestion rent but belongs to a rival."""
        # Given
        model = make_two_bus(line_cap=60.0)

        # When
        result = clear_market(ClearingProblem(model, base_set[0], 1, 1))

        # Then
        assert scenario_profit(result, model) == pytest.approx(0.0, abs=1e-9)

    def test_built_candidate_priced_at_its_bus(self, candidate_model, base_set):
        # When
        problem = ClearingProblem(candidate_model, base_set[0], 1, 1, {"C1": 2})
        result = clear_market(problem)

        # Then
        assert scenario_profit(result, candidate_model) == pytest.approx(25.0 * 20.0)


class TestExpectedDiscountedProfit:
    """Tests for expected_discounted_profit and its helpers."""

    def test_growth_and_discounting(self, make_two_bus, base_set):
        # Given
        model = make_two_bus(
            line_cap=60.0, g2_cap=30.0, years=2, growth=0.1, discount_rate=0.05
        )
        plan = InvestmentPlan.empty(())

        # When
        results = clear_grid(model, base_set, plan)
        value = expected_discounted_profit(results, plan, model, base_set)

        # Then
        hourly = 970.0 * 30.0
        assert value == pytest.approx(100.0 * hourly / 1.05 + 100.0 * hourly / 1.05**2)
        assert results[(0, 1, 2)].shed[2] == pytest.approx(20.0)

    def test_investment_is_charged(self, candidate_model, base_set):
        # Given
        plan = InvestmentPlan(("C1",), ((2, 1),))

        # When
        results = clear_grid(candidate_model, base_set, plan)
        value = expected_discounted_profit(results, plan, candidate_model, base_set)

        # Then
        assert value == pytest.approx(25.0 * 20.0 * 100.0 - 10_000.0)

    def test_probability_weighting(self, make_two_bus):
        """Half the time the line is out and G2 earns VOLL on its full output."""
        # Given
        model = make_two_bus(line_for=0.5)
        scenarios = enumerate_n_minus_1(model)
        plan = InvestmentPlan.empty(())

        # When
        results = clear_grid(model, scenarios, plan)

        # Then
        assert scenarios.probabilities == pytest.approx((0.5, 0.5))
        value = expected_discounted_profit(results, plan, model, scenarios)
        assert value == pytest.approx(0.5 * 100.0 * 970.0 * 50.0)

    def test_missing_cells(self, candidate_model, base_set):
        # Given
        plan = InvestmentPlan.empty(("C1",))

        # When/Then
        with pytest.raises(GridIncompleteError, match="1 cleared cells are missing"):
            expected_discounted_profit({}, plan, candidate_model, base_set)

    def test_invest_cost(self, candidate_model):
        # Given
        plan = InvestmentPlan(("C1",), ((2, 2),))

        # When/Then
        assert invest_cost(candidate_model, plan, 1) == 0.0
        assert invest_cost(candidate_model, plan, 2) == 10_000.0

    def test_profit_trace(self, candidate_model, base_set):
        # Given
        plan = InvestmentPlan(("C1",), ((2, 1),))
        results = clear_grid(candidate_model, base_set, plan)

        # When
        trace = profit_trace(results, candidate_model, base_set)

        # Then
        assert list(trace.columns) == [
            "scenario",
            "block",
            "year",
            "probability",
            "duration (h)",
            "profit ($/h)",
        ]
        assert trace["profit ($/h)"].tolist() == pytest.approx([500.0])
