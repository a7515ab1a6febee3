"""
Static power-system data model.

All types are frozen dataclasses: a SystemModel is built once by the loader and
shared read-only by scenario generation, market clearing and planning.
"""

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from gep_planner.common.exceptions import DataValidationError
from gep_planner.common.logging_config import setup_logger
from gep_planner.system.config import StudyConfig

# Configure logging
log = setup_logger(__name__)


@dataclass(frozen=True)
class Bus:
    """A network bus with its peak load for every planning year."""

    id: int
    peak_load_by_year: tuple[float, ...]

    def peak(self, year: int) -> float:
        """Peak load in MW for a 1-based year."""
        return self.peak_load_by_year[year - 1]


@dataclass(frozen=True)
class TransmissionLine:
    """A line modeled by its susceptance and thermal capacity."""

    id: str
    from_bus: int
    to_bus: int
    susceptance: float
    capacity: float
    for_rate: float


@dataclass(frozen=True)
class ConventionalUnit:
    """An existing unit (bus set) or a candidate unit (candidate_buses set)."""

    id: str
    bus: Optional[int]
    capacity: float
    marginal_cost: float
    for_rate: float
    owned_by_genco: bool
    candidate_buses: tuple[int, ...] = ()
    annual_invest_cost: float = 0.0

    @property
    def is_candidate(self) -> bool:
        return self.bus is None

    def invest_cost(self, bus: int, year: int) -> float:  # pylint: disable=unused-argument
        """Annualized investment cost in $/yr; location and year independent."""
        return self.annual_invest_cost


@dataclass(frozen=True)
class PowerCurve:
    """Single-turbine power curve as a piecewise-linear table.

    The first breakpoint is 0 m/s and the last is the cut-out speed. Output is
    interpolated linearly between breakpoints and is zero above cut-out.
    """

    speeds: tuple[float, ...]
    powers: tuple[float, ...]

    def __post_init__(self):
        speeds = np.asarray(self.speeds, dtype=float)
        powers = np.asarray(self.powers, dtype=float)
        if len(speeds) < 2 or len(speeds) != len(powers):
            raise DataValidationError("power curve needs at least two breakpoints")
        if speeds[0] != 0.0:
            raise DataValidationError("power curve must start at 0 m/s")
        if np.any(np.diff(speeds) <= 0):
            raise DataValidationError("power curve speeds must be strictly increasing")
        if np.any(powers < 0):
            raise DataValidationError("power curve outputs must be nonnegative")

    @property
    def rating(self) -> float:
        return max(self.powers)

    @property
    def cut_in(self) -> float:
        """Last speed with zero output before the first positive output."""
        first_positive = next(i for i, p in enumerate(self.powers) if p > 0)
        return self.speeds[max(first_positive - 1, 0)]

    @property
    def rated_speed(self) -> float:
        return self.speeds[self.powers.index(self.rating)]

    @property
    def cut_out(self) -> float:
        return self.speeds[-1]

    def __call__(self, speed: float) -> float:
        if speed < 0:
            raise DataValidationError(f"wind speed must be nonnegative, got {speed}")
        if speed > self.cut_out:
            return 0.0
        return float(np.interp(speed, self.speeds, self.powers))


@dataclass(frozen=True)
class WindFarm:
    """An existing (bus set) or candidate (candidate_buses set) wind farm."""

    id: str
    bus: Optional[int]
    n_turbines: int
    owned_by_genco: bool
    curve: PowerCurve
    candidate_buses: tuple[int, ...] = ()
    annual_invest_cost: float = 0.0

    @property
    def is_candidate(self) -> bool:
        return self.bus is None

    @property
    def capacity(self) -> float:
        return self.n_turbines * self.curve.rating

    def invest_cost(self, bus: int, year: int) -> float:  # pylint: disable=unused-argument
        """Annualized investment cost in $/yr; location and year independent."""
        return self.annual_invest_cost


@dataclass(frozen=True)
class LoadBlock:
    """One step of the load duration curve."""

    id: int
    level: float
    duration: float


@dataclass(frozen=True)
class SystemModel:
    """The full static input of a planning study."""

    buses: tuple[Bus, ...]
    lines: tuple[TransmissionLine, ...]
    units: tuple[ConventionalUnit, ...]
    wind_farms: tuple[WindFarm, ...]
    load_blocks: tuple[LoadBlock, ...]
    config: StudyConfig = field(default_factory=StudyConfig)

    @cached_property
    def bus_ids(self) -> tuple[int, ...]:
        return tuple(b.id for b in self.buses)

    @cached_property
    def existing_units(self) -> tuple[ConventionalUnit, ...]:
        return tuple(u for u in self.units if not u.is_candidate)

    @cached_property
    def candidate_units(self) -> tuple[ConventionalUnit, ...]:
        return tuple(u for u in self.units if u.is_candidate)

    @cached_property
    def existing_wind(self) -> tuple[WindFarm, ...]:
        return tuple(w for w in self.wind_farms if not w.is_candidate)

    @cached_property
    def candidate_wind(self) -> tuple[WindFarm, ...]:
        return tuple(w for w in self.wind_farms if w.is_candidate)

    @property
    def years(self) -> range:
        return range(1, self.config.years + 1)

    @property
    def total_hours(self) -> float:
        return float(sum(b.duration for b in self.load_blocks))

    def bus(self, bus_id: int) -> Bus:
        return self.buses[self.bus_ids.index(bus_id)]

    def block(self, block_id: int) -> LoadBlock:
        for block in self.load_blocks:
            if block.id == block_id:
                return block
        raise IndexError(f"unknown load block {block_id}")

    def grid(self) -> Iterator[tuple[int, int]]:
        """Every (block id, year) pair in canonical order."""
        for year in self.years:
            for block in self.load_blocks:
                yield block.id, year


def grow_peaks(peak: float, years: int, growth: float) -> tuple[float, ...]:
    """Peak load per year: peak·(1+g)^(y−1) for y = 1..years."""
    return tuple(peak * (1.0 + growth) ** (y - 1) for y in range(1, years + 1))


def block_load(model: SystemModel, n: int, b: int, y: int) -> float:
    """Load in MW at bus n, block b and year y: L_b · L^peak_ny."""
    if y not in model.years:
        raise IndexError(f"year {y} outside horizon 1..{model.config.years}")
    return model.block(b).level * model.bus(n).peak(y)


def annualized_invest_cost(
    capacity_mw: float, rate_per_kw: float, payback_years: float
) -> float:
    """Yearly investment payment of a capacity paid off linearly.

    >>> annualized_invest_cost(50, 400, 40)
    500000.0
    """
    if capacity_mw <= 0 or rate_per_kw <= 0 or payback_years <= 0:
        raise DataValidationError(
            "capacity, rate and payback period must be positive, got "
            f"{capacity_mw}, {rate_per_kw}, {payback_years}"
        )
    return capacity_mw * 1000.0 * rate_per_kw / payback_years


def with_config(model: SystemModel, config: StudyConfig) -> SystemModel:
    """Rebind a model to another config, regrowing peaks from the year-1 values."""
    buses = tuple(
        Bus(b.id, grow_peaks(b.peak_load_by_year[0], config.years, config.growth))
        for b in model.buses
    )
    return dataclasses.replace(model, buses=buses, config=config)


def coarsen_blocks(model: SystemModel, n_groups: int) -> SystemModel:
    """Merge consecutive load blocks into `n_groups` duration-weighted blocks.

    Total hours and the duration-weighted mean level are preserved; the merged
    blocks stay sorted by level.
    """
    if n_groups < 1:
        raise DataValidationError("n_groups must be at least 1")
    if n_groups >= len(model.load_blocks):
        return model

    blocks = []
    for gid, group in enumerate(
        np.array_split(np.arange(len(model.load_blocks)), n_groups), start=1
    ):
        members = [model.load_blocks[i] for i in group]
        duration = float(sum(b.duration for b in members))
        level = sum(b.level * b.duration for b in members) / duration
        blocks.append(LoadBlock(id=gid, level=level, duration=duration))
    log.info(f"Coarsened {len(model.load_blocks)} load blocks into {n_groups}")
    return dataclasses.replace(model, load_blocks=tuple(blocks))


def with_candidate_cost(model: SystemModel, marginal_cost: float) -> SystemModel:
    """Set the marginal cost of every candidate unit."""
    units = tuple(
        dataclasses.replace(u, marginal_cost=marginal_cost) if u.is_candidate else u
        for u in model.units
    )
    return dataclasses.replace(model, units=units)


def with_candidate_turbines(model: SystemModel, n_turbines: int) -> SystemModel:
    """Resize every candidate wind farm, recomputing its investment cost."""
    cfg = model.config
    farms = tuple(
        (
            dataclasses.replace(
                w,
                n_turbines=n_turbines,
                annual_invest_cost=annualized_invest_cost(
                    n_turbines * w.curve.rating,
                    cfg.invest_per_kw_wind,
                    cfg.payback_years,
                ),
            )
            if w.is_candidate
            else w
        )
        for w in model.wind_farms
    )
    return dataclasses.replace(model, wind_farms=farms)
