"""Unit tests for availability scenarios."""

import math

import pytest

from gep_planner.common.exceptions import DataValidationError, ScenarioCapError
from gep_planner.common.filesystem import FAILURE_STUDY_DIR, RTS24_DIR
from gep_planner.scenarios.availability import base_scenario_set, enumerate_n_minus_1
from gep_planner.system.data_loader import load_system


class TestEnumerateNMinus1:
    """Tests for enumerate_n_minus_1."""

    def test_no_failable_devices(self, candidate_model):
        """All FOR = 0 leaves the base scenario alone."""
        # When
        scenarios = enumerate_n_minus_1(candidate_model)

        # Then
        assert len(scenarios) == 1
        assert scenarios[0].probability == 1.0

    def test_single_unit(self, make_two_bus):
        """One unit with FOR 0.1 gives (0.9, 0.1)."""
        # When
        scenarios = enumerate_n_minus_1(make_two_bus(g1_for=0.1))

        # Then
        assert [s.label for s in scenarios] == ["base", "G1"]
        assert scenarios.probabilities == pytest.approx((0.9, 0.1), abs=1e-12)
        assert scenarios[1].availability.unit_status("G1") == 0
        assert scenarios[1].availability.unit_status("G2") == 1

    def test_unit_and_line(self, make_two_bus):
        """Probabilities are conditioned on at most one failure."""
        # When
        scenarios = enumerate_n_minus_1(make_two_bus(g1_for=0.1, line_for=0.02))

        # Then
        raw = [0.9 * 0.98, 0.1 * 0.98, 0.9 * 0.02]
        expected = [w / sum(raw) for w in raw]
        assert [s.label for s in scenarios] == ["base", "G1", "l1"]
        assert scenarios.probabilities == pytest.approx(expected, abs=1e-12)
        assert scenarios[2].availability.line_status("l1") == 0

    def test_two_outages(self, make_two_bus):
        # When
        scenarios = enumerate_n_minus_1(
            make_two_bus(g1_for=0.1, line_for=0.02), max_outages=2
        )

        # Then
        assert [s.label for s in scenarios] == ["base", "G1", "l1", "G1-l1"]
        assert scenarios[3].availability.outages == 2
        assert math.fsum(scenarios.probabilities) == pytest.approx(1.0, abs=1e-12)

    def test_zero_outages_overrides_config(self, make_two_bus):
        """An explicit 0 keeps only the base scenario even when the config allows 2."""
        # Given
        model = make_two_bus(g1_for=0.1, line_for=0.02, max_outages=2)

        # When
        scenarios = enumerate_n_minus_1(model, max_outages=0)

        # Then
        assert [s.label for s in scenarios] == ["base"]
        assert scenarios[0].probability == 1.0
        assert len(enumerate_n_minus_1(model)) == 4

    def test_scenario_cap(self, make_two_bus):
        # Given
        model = make_two_bus(g1_for=0.1, line_for=0.02, max_scenarios=2)

        # When/Then
        with pytest.raises(ScenarioCapError, match="exceed max_scenarios=2"):
            enumerate_n_minus_1(model)

    def test_negative_outages(self, make_two_bus):
        with pytest.raises(DataValidationError, match="max_outages must be >= 0"):
            enumerate_n_minus_1(make_two_bus(g1_for=0.1), max_outages=-1)

    def test_certain_failure(self, make_two_bus):
        with pytest.raises(DataValidationError, match="never available"):
            enumerate_n_minus_1(make_two_bus(g1_for=1.0))

    def test_rts24_with_candidates(self):
        """One scenario per unit, candidate and line plus the base case."""
        # Given
        model = load_system(RTS24_DIR, candidates=FAILURE_STUDY_DIR / "candidates.csv")

        # When
        scenarios = enumerate_n_minus_1(model)

        # Then
        assert len(scenarios) == 1 + 32 + 4 + 34
        assert math.fsum(scenarios.probabilities) == pytest.approx(1.0, abs=1e-12)
        assert scenarios[0].probability == max(scenarios.probabilities)


def test_base_scenario_set():
    scenarios = base_scenario_set()
    assert len(scenarios) == 1
    assert scenarios[0].availability.outages == 0
