"""
Loading, validation and canonical saving of SystemModel data files.

A data directory holds buses.csv, lines.csv, units.csv and blocks.csv, plus the
optional wind.csv and curve.csv. Candidate units and wind farms can come from extra
files using the units.csv / wind.csv schemas.
"""

from pathlib import Path
from typing import Callable, Iterable, Optional, TypeVar

import numpy as np
import pandas as pd
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from gep_planner.common.exceptions import (
    DataNotFoundError,
    DataValidationError,
    MissingColumnsError,
)
from gep_planner.common.filesystem import read_table, write_table
from gep_planner.common.logging_config import setup_logger
from gep_planner.system.config import StudyConfig
from gep_planner.system.model import (
    Bus,
    ConventionalUnit,
    LoadBlock,
    PowerCurve,
    SystemModel,
    TransmissionLine,
    WindFarm,
    annualized_invest_cost,
    coarsen_blocks,
    grow_peaks,
)

# Configure logging
log = setup_logger(__name__)

T = TypeVar("T")

BUS_COLUMNS = ("id", "peak_load")
LINE_COLUMNS = ("from", "to", "susceptance", "capacity")
UNIT_COLUMNS = ("id", "bus", "capacity", "cost")
WIND_COLUMNS = ("id", "bus", "n_turbines")
BLOCK_COLUMNS = ("id", "level", "duration_h")
CURVE_COLUMNS = ("speed_mps", "power_mw")

_TRUE = {"1", "true", "yes", "y", "t"}
_FALSE = {"0", "false", "no", "n", "f", ""}


def _require_columns(df: pd.DataFrame, table: str, columns: Iterable[str]) -> None:
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise MissingColumnsError(table, missing, df.columns)


def _cell(
    df: pd.DataFrame, row: int, column: str, table: str, parse: Callable[[str], T]
) -> T:
    """Parse one cell, reporting the 1-based file line on failure."""
    raw = str(df.iloc[row][column]).strip()
    try:
        return parse(raw)
    except (TypeError, ValueError) as e:
        raise DataValidationError(
            f"{table} line {row + 2}: cannot parse {column}={raw!r}: {e}"
        ) from e


def _optional(df: pd.DataFrame, row: int, column: str) -> str:
    if column not in df.columns:
        return ""
    return str(df.iloc[row][column]).strip()


def _parse_bool(raw: str) -> bool:
    value = raw.lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError("expected a boolean")


def _parse_buses(raw: str) -> tuple[int, ...]:
    parts = [p for p in raw.replace(" ", ";").replace(",", ";").split(";") if p]
    return tuple(int(p) for p in parts)


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise DataValidationError(message)


def _load_buses(df: pd.DataFrame, config: StudyConfig) -> tuple[Bus, ...]:
    _require_columns(df, "buses.csv", BUS_COLUMNS)
    rows = []
    for i in range(len(df)):
        bus_id = _cell(df, i, "id", "buses.csv", int)
        peak = _cell(df, i, "peak_load", "buses.csv", float)
        _check(peak >= 0, f"buses.csv line {i + 2}: peak_load must be >= 0")
        rows.append((bus_id, peak))
    ids = sorted(r[0] for r in rows)
    _check(len(set(ids)) == len(ids), "buses.csv: duplicate bus id")
    _check(ids == list(range(1, len(ids) + 1)), "buses.csv: ids must be 1..N")
    return tuple(
        Bus(bus_id, grow_peaks(peak, config.years, config.growth))
        for bus_id, peak in sorted(rows)
    )


def _load_lines(df: pd.DataFrame, config: StudyConfig) -> tuple[TransmissionLine, ...]:
    _require_columns(df, "lines.csv", LINE_COLUMNS)
    lines = []
    for i in range(len(df)):
        line_id = _optional(df, i, "id") or f"l{i + 1}"
        for_raw = _optional(df, i, "for")
        line = TransmissionLine(
            id=line_id,
            from_bus=_cell(df, i, "from", "lines.csv", int),
            to_bus=_cell(df, i, "to", "lines.csv", int),
            susceptance=_cell(df, i, "susceptance", "lines.csv", float),
            capacity=_cell(df, i, "capacity", "lines.csv", float),
            for_rate=float(for_raw) if for_raw else config.line_for_default,
        )
        where = f"lines.csv line {i + 2}"
        _check(line.from_bus != line.to_bus, f"{where}: from and to must differ")
        _check(line.susceptance > 0, f"{where}: susceptance must be > 0")
        _check(line.capacity > 0, f"{where}: capacity must be > 0")
        _check(0 <= line.for_rate < 1, f"{where}: for must lie in [0, 1)")
        lines.append(line)
    return tuple(lines)


def _invest_cost(df, i, capacity, rate_default, config) -> float:
    annual = _optional(df, i, "annual_invest_cost")
    if annual:
        return float(annual)
    rate = _optional(df, i, "invest_per_kw")
    payback = _optional(df, i, "payback_years")
    return annualized_invest_cost(
        capacity,
        float(rate) if rate else rate_default,
        float(payback) if payback else config.payback_years,
    )


def _load_units(
    df: pd.DataFrame, table: str, config: StudyConfig
) -> list[ConventionalUnit]:
    _require_columns(df, table, UNIT_COLUMNS)
    units = []
    for i in range(len(df)):
        where = f"{table} line {i + 2}"
        bus_raw = _optional(df, i, "bus")
        candidate = bus_raw == ""
        capacity = _cell(df, i, "capacity", table, float)
        _check(capacity > 0, f"{where}: capacity must be > 0")
        for_raw = _optional(df, i, "for")
        default_for = config.candidate_for_default if candidate else 0.0
        candidate_buses = _cell(df, i, "candidate_buses", table, _parse_buses) if (
            "candidate_buses" in df.columns
        ) else ()
        _check(
            candidate == bool(candidate_buses),
            f"{where}: a unit needs either a bus or candidate_buses, not both",
        )
        unit = ConventionalUnit(
            id=_cell(df, i, "id", table, str),
            bus=None if candidate else int(bus_raw),
            capacity=capacity,
            marginal_cost=_cell(df, i, "cost", table, float),
            for_rate=float(for_raw) if for_raw else default_for,
            owned_by_genco=candidate or _parse_bool(_optional(df, i, "owned")),
            candidate_buses=candidate_buses,
            annual_invest_cost=(
                _invest_cost(df, i, capacity, config.invest_per_kw_unit, config)
                if candidate
                else 0.0
            ),
        )
        _check(unit.marginal_cost >= 0, f"{where}: cost must be >= 0")
        _check(0 <= unit.for_rate < 1, f"{where}: for must lie in [0, 1)")
        units.append(unit)
    return units


def _load_curve(df: Optional[pd.DataFrame]) -> Optional[PowerCurve]:
    if df is None:
        return None
    _require_columns(df, "curve.csv", CURVE_COLUMNS)
    speeds = tuple(_cell(df, i, "speed_mps", "curve.csv", float) for i in range(len(df)))
    powers = tuple(_cell(df, i, "power_mw", "curve.csv", float) for i in range(len(df)))
    return PowerCurve(speeds, powers)


def load_power_curve(path: Path) -> PowerCurve:
    """Read a single-turbine power curve table (speed_mps, power_mw)."""
    curve = _load_curve(read_table(path))
    if curve is None:
        raise DataNotFoundError(f"Power curve not found: {path}")
    return curve


def _load_wind(
    df: pd.DataFrame, table: str, curve: Optional[PowerCurve], config: StudyConfig
) -> list[WindFarm]:
    _require_columns(df, table, WIND_COLUMNS)
    if curve is None:
        if len(df):
            raise DataNotFoundError(f"{table} lists wind farms but curve.csv is missing")
        return []
    farms = []
    for i in range(len(df)):
        where = f"{table} line {i + 2}"
        bus_raw = _optional(df, i, "bus")
        candidate = bus_raw == ""
        n_turbines = _cell(df, i, "n_turbines", table, int)
        _check(n_turbines >= 1, f"{where}: n_turbines must be >= 1")
        candidate_buses = _cell(df, i, "candidate_buses", table, _parse_buses) if (
            "candidate_buses" in df.columns
        ) else ()
        _check(
            candidate == bool(candidate_buses),
            f"{where}: a farm needs either a bus or candidate_buses, not both",
        )
        farms.append(
            WindFarm(
                id=_cell(df, i, "id", table, str),
                bus=None if candidate else int(bus_raw),
                n_turbines=n_turbines,
                owned_by_genco=candidate or _parse_bool(_optional(df, i, "owned")),
                curve=curve,
                candidate_buses=candidate_buses,
                annual_invest_cost=(
                    _invest_cost(
                        df,
                        i,
                        n_turbines * curve.rating,
                        config.invest_per_kw_wind,
                        config,
                    )
                    if candidate
                    else 0.0
                ),
            )
        )
    return farms


def _load_blocks(df: pd.DataFrame) -> tuple[LoadBlock, ...]:
    _require_columns(df, "blocks.csv", BLOCK_COLUMNS)
    blocks = []
    for i in range(len(df)):
        block = LoadBlock(
            id=_cell(df, i, "id", "blocks.csv", int),
            level=_cell(df, i, "level", "blocks.csv", float),
            duration=_cell(df, i, "duration_h", "blocks.csv", float),
        )
        where = f"blocks.csv line {i + 2}"
        _check(0 < block.level <= 1, f"{where}: level must lie in (0, 1]")
        _check(block.duration > 0, f"{where}: duration_h must be > 0")
        blocks.append(block)
    _check(len(blocks) > 0, "blocks.csv: at least one load block is required")
    _check(
        len({b.id for b in blocks}) == len(blocks), "blocks.csv: duplicate block id"
    )
    return tuple(sorted(blocks, key=lambda b: (b.level, b.id)))


def is_connected(bus_ids: tuple[int, ...], lines: Iterable[TransmissionLine]) -> bool:
    """True when the lines connect every bus."""
    index = {b: i for i, b in enumerate(bus_ids)}
    edges = [(index[ln.from_bus], index[ln.to_bus]) for ln in lines]
    if not edges:
        return len(bus_ids) <= 1
    rows, cols = zip(*edges)
    graph = coo_matrix(
        (np.ones(len(edges)), (rows, cols)), shape=(len(bus_ids), len(bus_ids))
    )
    n_components, _ = connected_components(graph, directed=False)
    return n_components == 1


def validate_system(model: SystemModel) -> SystemModel:
    """Check the cross-table invariants of a SystemModel.

    Raises:
        DataValidationError: On dangling references, duplicate ids, a disconnected
            base network or a value of lost load below some marginal cost.
    """
    bus_ids = set(model.bus_ids)
    for line in model.lines:
        for bus in (line.from_bus, line.to_bus):
            _check(bus in bus_ids, f"line {line.id} references unknown bus n{bus}")
    _check(
        len({ln.id for ln in model.lines}) == len(model.lines), "duplicate line id"
    )

    asset_ids = [u.id for u in model.units] + [w.id for w in model.wind_farms]
    duplicates = sorted({a for a in asset_ids if asset_ids.count(a) > 1})
    _check(not duplicates, f"duplicate unit or wind farm id: {', '.join(duplicates)}")
    for asset in (*model.units, *model.wind_farms):
        buses = asset.candidate_buses if asset.is_candidate else (asset.bus,)
        for bus in buses:
            _check(bus in bus_ids, f"{asset.id} references unknown bus n{bus}")

    _check(
        model.config.slack_bus in bus_ids,
        f"slack bus n{model.config.slack_bus} does not exist",
    )
    _check(
        is_connected(model.bus_ids, model.lines),
        "base network is disconnected with all lines in service",
    )
    if model.units:
        top_cost = max(u.marginal_cost for u in model.units)
        _check(
            model.config.voll > top_cost,
            f"voll {model.config.voll} must exceed every marginal cost ({top_cost})",
        )
    return model


def load_system(
    data_dir: Path,
    config: Optional[StudyConfig] = None,
    candidates: Optional[Path] = None,
    wind: Optional[Path] = None,
) -> SystemModel:
    """Load and validate a SystemModel from a data directory.

    Args:
        data_dir: Directory with buses.csv, lines.csv, units.csv, blocks.csv and
            optionally wind.csv and curve.csv.
        config: Study configuration; defaults to `StudyConfig()`.
        candidates: Extra units file (units.csv schema) appended to units.csv.
        wind: Wind farm file replacing data_dir/wind.csv.
    """
    config = config or StudyConfig()
    if not data_dir.is_dir():
        raise DataNotFoundError(f"Data directory not found: {data_dir}")

    buses = _load_buses(read_table(data_dir / "buses.csv"), config)
    lines = _load_lines(read_table(data_dir / "lines.csv"), config)
    units = _load_units(read_table(data_dir / "units.csv"), "units.csv", config)
    if candidates is not None:
        units += _load_units(read_table(candidates), candidates.name, config)
    blocks = _load_blocks(read_table(data_dir / "blocks.csv"))

    wind_path = wind or data_dir / "wind.csv"
    wind_df = read_table(wind_path, required=wind is not None)
    curve_path = wind_path.parent / "curve.csv"
    curve = _load_curve(read_table(curve_path, required=False))
    farms = []
    if wind_df is not None:
        farms = _load_wind(wind_df, wind_path.name, curve, config)

    model = SystemModel(
        buses=buses,
        lines=lines,
        units=tuple(units),
        wind_farms=tuple(farms),
        load_blocks=blocks,
        config=config,
    )
    if config.coarsen_blocks:
        model = coarsen_blocks(model, config.coarsen_blocks)
    validate_system(model)
    log.info(
        f"Loaded system from {data_dir}: {len(buses)} buses, {len(lines)} lines, "
        f"{len(model.existing_units)} units (+{len(model.candidate_units)} candidates), "
        f"{len(model.existing_wind)} wind farms "
        f"(+{len(model.candidate_wind)} candidates), "
        f"{len(blocks)} load blocks"
    )
    return model


def _join_buses(buses: tuple[int, ...]) -> str:
    return ";".join(str(b) for b in buses)


def save_system(model: SystemModel, directory: Path) -> None:
    """Write a SystemModel in the canonical CSV layout read by `load_system`."""
    directory.mkdir(parents=True, exist_ok=True)
    write_table(
        pd.DataFrame(
            {
                "id": [b.id for b in model.buses],
                "peak_load": [b.peak_load_by_year[0] for b in model.buses],
            }
        ),
        directory / "buses.csv",
    )
    write_table(
        pd.DataFrame(
            {
                "id": [ln.id for ln in model.lines],
                "from": [ln.from_bus for ln in model.lines],
                "to": [ln.to_bus for ln in model.lines],
                "susceptance": [ln.susceptance for ln in model.lines],
                "capacity": [ln.capacity for ln in model.lines],
                "for": [ln.for_rate for ln in model.lines],
            }
        ),
        directory / "lines.csv",
    )
    write_table(
        pd.DataFrame(
            {
                "id": [u.id for u in model.units],
                "bus": ["" if u.bus is None else u.bus for u in model.units],
                "capacity": [u.capacity for u in model.units],
                "cost": [u.marginal_cost for u in model.units],
                "for": [u.for_rate for u in model.units],
                "owned": [int(u.owned_by_genco) for u in model.units],
                "candidate_buses": [_join_buses(u.candidate_buses) for u in model.units],
                "annual_invest_cost": [u.annual_invest_cost for u in model.units],
            },
            columns=[
                *UNIT_COLUMNS,
                "for",
                "owned",
                "candidate_buses",
                "annual_invest_cost",
            ],
        ),
        directory / "units.csv",
    )
    write_table(
        pd.DataFrame(
            {
                "id": [b.id for b in model.load_blocks],
                "level": [b.level for b in model.load_blocks],
                "duration_h": [b.duration for b in model.load_blocks],
            }
        ),
        directory / "blocks.csv",
    )
    if model.wind_farms:
        curves = {w.curve for w in model.wind_farms}
        _check(len(curves) == 1, "canonical layout supports a single power curve")
        curve = curves.pop()
        write_table(
            pd.DataFrame({"speed_mps": curve.speeds, "power_mw": curve.powers}),
            directory / "curve.csv",
        )
        write_table(
            pd.DataFrame(
                {
                    "id": [w.id for w in model.wind_farms],
                    "bus": ["" if w.bus is None else w.bus for w in model.wind_farms],
                    "n_turbines": [w.n_turbines for w in model.wind_farms],
                    "owned": [int(w.owned_by_genco) for w in model.wind_farms],
                    "candidate_buses": [
                        _join_buses(w.candidate_buses) for w in model.wind_farms
                    ],
                    "annual_invest_cost": [
                        w.annual_invest_cost for w in model.wind_farms
                    ],
                }
            ),
            directory / "wind.csv",
        )
    log.info(f"Saved system to {directory}")
