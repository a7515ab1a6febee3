"""Unit tests for network topology helpers."""

from gep_planner.market.network import in_service_lines, island_pins, islands
from gep_planner.scenarios.types import AvailabilityScenario


class TestIslands:
    """Tests for islands and island_pins."""

    def test_connected_network(self, make_random_system):
        # Given
        model = make_random_system(0)
        intact = AvailabilityScenario("base")

        # When/Then
        assert islands(model, intact) == [(1, 2, 3)]
        assert island_pins(model, intact) == (1,)
        assert len(in_service_lines(model, intact)) == 3

    def test_single_line_outage_keeps_triangle_connected(self, make_random_system):
        # Given
        model = make_random_system(0)
        outage = AvailabilityScenario("l1", failed_lines=frozenset({"l1"}))

        # When/Then
        assert islands(model, outage) == [(1, 2, 3)]
        assert [ln.id for ln in in_service_lines(model, outage)] == ["l2", "l3"]

    def test_isolated_bus_gets_its_own_pin(self, make_random_system):
        # Given
        model = make_random_system(0)
        outage = AvailabilityScenario("l2-l3", failed_lines=frozenset({"l2", "l3"}))

        # When/Then
        assert islands(model, outage) == [(1, 2), (3,)]
        assert island_pins(model, outage) == (1, 3)

    def test_slack_bus_listed_first(self, make_two_bus):
        # Given
        model = make_two_bus(slack_bus=2)
        outage = AvailabilityScenario("l1", failed_lines=frozenset({"l1"}))

        # When/Then
        assert island_pins(model, outage) == (2, 1)
