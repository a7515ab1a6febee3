"""Joint scenario sets from independent availability and wind sets."""

from gep_planner.common.exceptions import DataValidationError, ScenarioCapError
from gep_planner.common.logging_config import setup_logger
from gep_planner.scenarios.types import Scenario, ScenarioSet, normalized

# Configure logging
log = setup_logger(__name__)


def combine(avail: ScenarioSet, wind: ScenarioSet, max_scenarios: int) -> ScenarioSet:
    """Cartesian product of an availability set and a wind set.

    Availability is taken from `avail` and wind data from `wind`; probabilities
    multiply. Availability varies slowest, so the base availability scenario's
    wind scenarios come first.

    Raises:
        ScenarioCapError: If the product has more than `max_scenarios` members.
    """
    size = len(avail) * len(wind)
    if size > max_scenarios:
        raise ScenarioCapError(
            f"{len(avail)} availability × {len(wind)} wind = {size} scenarios exceed "
            f"max_scenarios={max_scenarios}"
        )
    if any(w.wind is None for w in wind):
        raise DataValidationError("the wind set has scenarios without wind data")

    scenarios = []
    weights = []
    for a in avail:
        for w in wind:
            label = w.label if a.label == "base" else f"{a.label}|{w.label}"
            scenarios.append(Scenario(label, 0.0, a.availability, w.wind))
            weights.append(a.probability * w.probability)
    log.info(f"Combined {len(avail)} availability and {len(wind)} wind scenarios")
    return normalized(scenarios, weights)
