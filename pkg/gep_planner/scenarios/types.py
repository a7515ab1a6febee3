"""Scenario containers shared by the scenario engine, market clearing and planner."""

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

import pandas as pd

from gep_planner.common.exceptions import DataValidationError

PROBABILITY_TOL = 1e-12


@dataclass(frozen=True)
class AvailabilityScenario:
    """Joint availability of units and lines; devices not listed are available."""

    label: str
    failed_units: frozenset[str] = frozenset()
    failed_lines: frozenset[str] = frozenset()
    probability: float = 1.0

    def unit_status(self, unit_id: str) -> int:
        """k_gs / k_g's: 1 when the unit is available."""
        return 0 if unit_id in self.failed_units else 1

    def line_status(self, line_id: str) -> int:
        """k_nms: 1 when the line is in service."""
        return 0 if line_id in self.failed_lines else 1

    @property
    def outages(self) -> int:
        """Hamming distance from the all-available vector."""
        return len(self.failed_units) + len(self.failed_lines)


@dataclass(frozen=True)
class WindScenario:
    """Wind speed and single-turbine output per site (site id = bus id)."""

    label: str
    speeds: Mapping[int, float] = field(default_factory=dict)
    turbine_power: Mapping[int, float] = field(default_factory=dict)
    probability: float = 1.0

    def farm_power(self, site: int, n_turbines: int) -> float:
        """Farm-level available power N^T · P̄^{W,1} at a site."""
        try:
            return n_turbines * self.turbine_power[site]
        except KeyError as e:
            raise DataValidationError(
                f"wind scenario {self.label} has no data for site n{site}"
            ) from e


@dataclass(frozen=True)
class Scenario:
    """One joint scenario: availability and (optionally) wind."""

    label: str
    probability: float
    availability: AvailabilityScenario
    wind: Optional[WindScenario] = None

    def farm_power(self, site: int, n_turbines: int) -> float:
        if self.wind is None:
            raise DataValidationError(
                f"scenario {self.label} has no wind data but the system has wind farms"
            )
        return self.wind.farm_power(site, n_turbines)


@dataclass(frozen=True)
class ScenarioSet:
    """An ordered, normalized list of scenarios."""

    scenarios: tuple[Scenario, ...]

    def __post_init__(self):
        if not self.scenarios:
            raise DataValidationError("a scenario set must not be empty")
        total = math.fsum(s.probability for s in self.scenarios)
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise DataValidationError(f"scenario probabilities sum to {total!r}, not 1")
        if any(s.probability < 0 for s in self.scenarios):
            raise DataValidationError("scenario probabilities must be nonnegative")

    def __len__(self) -> int:
        return len(self.scenarios)

    def __iter__(self) -> Iterator[Scenario]:
        return iter(self.scenarios)

    def __getitem__(self, index: int) -> Scenario:
        return self.scenarios[index]

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(s.probability for s in self.scenarios)

    @property
    def sites(self) -> tuple[int, ...]:
        sites: set[int] = set()
        for s in self.scenarios:
            if s.wind is not None:
                sites.update(s.wind.speeds)
        return tuple(sorted(sites))

    def to_frame(self) -> pd.DataFrame:
        """Tabular view: one row per scenario, wind speeds per site in m/s."""
        rows = []
        for s in self.scenarios:
            row = {
                "scenario": s.label,
                "probability": s.probability,
                "failed_units": ";".join(sorted(s.availability.failed_units)),
                "failed_lines": ";".join(sorted(s.availability.failed_lines)),
            }
            if s.wind is not None:
                for site, speed in sorted(s.wind.speeds.items()):
                    row[f"speed_n{site} (m/s)"] = speed
            rows.append(row)
        return pd.DataFrame(rows)


def normalized(
    scenarios: Sequence[Scenario], weights: Optional[Sequence[float]] = None
) -> ScenarioSet:
    """Rescale probabilities (or the given raw weights) so they sum to one."""
    raw = list(weights) if weights is not None else [s.probability for s in scenarios]
    total = math.fsum(raw)
    if total <= 0:
        raise DataValidationError("scenario weights must have a positive sum")
    return ScenarioSet(
        tuple(
            Scenario(s.label, w / total, s.availability, s.wind)
            for s, w in zip(scenarios, raw)
        )
    )
