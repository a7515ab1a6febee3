"""
Availability scenarios from forced outage rates.

The base scenario has every device available; each further scenario fails a set of
at most `max_outages` devices. A scenario's raw probability is the product of FOR
for failed devices and (1 − FOR) for the others, and the set is normalized so the
probabilities sum to one (the distribution conditioned on at most k failures).
"""

import itertools
import math
from dataclasses import dataclass

from gep_planner.common.exceptions import DataValidationError, ScenarioCapError
from gep_planner.common.logging_config import setup_logger
from gep_planner.scenarios.types import (
    AvailabilityScenario,
    Scenario,
    ScenarioSet,
    normalized,
)
from gep_planner.system.model import SystemModel

# Configure logging
log = setup_logger(__name__)


@dataclass(frozen=True)
class _Device:
    kind: str  # "unit" or "line"
    id: str
    for_rate: float


def _failable_devices(model: SystemModel) -> list[_Device]:
    """Units (existing then candidate) and lines with a positive FOR, model order."""
    devices = [_Device("unit", u.id, u.for_rate) for u in model.existing_units]
    devices += [_Device("unit", u.id, u.for_rate) for u in model.candidate_units]
    devices += [_Device("line", ln.id, ln.for_rate) for ln in model.lines]
    for device in devices:
        if device.for_rate >= 1:
            raise DataValidationError(
                f"{device.kind} {device.id} has FOR = {device.for_rate}; "
                "a device that is never available degenerates the scenario set"
            )
        if device.for_rate < 0:
            raise DataValidationError(f"{device.kind} {device.id} has negative FOR")
    return [d for d in devices if d.for_rate > 0]


def base_scenario_set() -> ScenarioSet:
    """A single all-available scenario with probability one."""
    return ScenarioSet((Scenario("base", 1.0, AvailabilityScenario("base")),))


def enumerate_n_minus_1(
    model: SystemModel, max_outages: int | None = None
) -> ScenarioSet:
    """Enumerate availability scenarios with up to `max_outages` simultaneous failures.

    Args:
        model: System whose units, candidate units and lines may fail. Wind farms
            never fail.
        max_outages: Largest number of simultaneous outages; defaults to
            `model.config.max_outages` (1, the N-1 set).

    Returns:
        The normalized scenario set; the base scenario comes first.

    Raises:
        DataValidationError: If a device has FOR = 1 or `max_outages` is negative.
        ScenarioCapError: If the set would exceed `model.config.max_scenarios`.
    """
    k = model.config.max_outages if max_outages is None else max_outages
    if k < 0:
        raise DataValidationError(f"max_outages must be >= 0, got {k}")
    devices = _failable_devices(model)

    n_scenarios = sum(math.comb(len(devices), j) for j in range(0, k + 1))
    if n_scenarios > model.config.max_scenarios:
        raise ScenarioCapError(
            f"{n_scenarios} availability scenarios exceed max_scenarios="
            f"{model.config.max_scenarios}"
        )

    base = math.prod(1.0 - d.for_rate for d in devices)
    odds = [d.for_rate / (1.0 - d.for_rate) for d in devices]

    scenarios = []
    weights = []
    for j in range(0, k + 1):
        for combo in itertools.combinations(range(len(devices)), j):
            failed = [devices[i] for i in combo]
            label = "base" if not failed else "-".join(f"{d.id}" for d in failed)
            availability = AvailabilityScenario(
                label=label,
                failed_units=frozenset(d.id for d in failed if d.kind == "unit"),
                failed_lines=frozenset(d.id for d in failed if d.kind == "line"),
            )
            scenarios.append(Scenario(label, 0.0, availability))
            weights.append(base * math.prod(odds[i] for i in combo))

    result = normalized(scenarios, weights)
    result = ScenarioSet(
        tuple(
            Scenario(
                s.label,
                s.probability,
                AvailabilityScenario(
                    s.label,
                    s.availability.failed_units,
                    s.availability.failed_lines,
                    s.probability,
                ),
            )
            for s in result
        )
    )
    log.info(
        f"Enumerated {len(result)} availability scenarios "
        f"({len(devices)} failable devices, up to {k} outage(s)); "
        f"base probability {result[0].probability:.6f}"
    )
    return result
