"""This file defines pytest fixtures available for all tests."""

from typing import Optional

import numpy as np
import pandas as pd
import pytest

from gep_planner.common.filesystem import RTS24_DIR
from gep_planner.scenarios.availability import base_scenario_set, enumerate_n_minus_1
from gep_planner.scenarios.combine import combine
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.scenarios.wind import wind_scenarios_from_speeds
from gep_planner.system.config import StudyConfig
from gep_planner.system.data_loader import load_system, save_system
from gep_planner.system.model import (
    Bus,
    ConventionalUnit,
    LoadBlock,
    PowerCurve,
    SystemModel,
    TransmissionLine,
    WindFarm,
    grow_peaks,
)


def _model(
    peaks: dict[int, float],
    lines: list[tuple[str, int, int, float, float, float]],
    units: list[ConventionalUnit],
    blocks: Optional[list[LoadBlock]] = None,
    wind: Optional[list[WindFarm]] = None,
    **config,
) -> SystemModel:
    cfg = StudyConfig(**config)
    return SystemModel(
        buses=tuple(
            Bus(n, grow_peaks(p, cfg.years, cfg.growth))
            for n, p in sorted(peaks.items())
        ),
        lines=tuple(TransmissionLine(*line) for line in lines),
        units=tuple(units),
        wind_farms=tuple(wind or ()),
        load_blocks=tuple(blocks or (LoadBlock(1, 1.0, 100.0),)),
        config=cfg,
    )


def unit(
    uid: str,
    bus: Optional[int],
    capacity: float,
    cost: float,
    owned: bool = False,
    for_rate: float = 0.0,
    candidate_buses: tuple[int, ...] = (),
    invest: float = 0.0,
) -> ConventionalUnit:
    return ConventionalUnit(
        id=uid,
        bus=bus,
        capacity=capacity,
        marginal_cost=cost,
        for_rate=for_rate,
        owned_by_genco=owned or bus is None,
        candidate_buses=candidate_buses,
        annual_invest_cost=invest,
    )


@pytest.fixture
def make_unit():
    """Factory for conventional units; candidates are those without a bus."""
    return unit


@pytest.fixture
def make_two_bus():
    """Factory for a two-bus system: cheap rival G1 at n1, GENCO unit G2 at n2.

    The 100 MW load sits at n2 and one line of `line_cap` MW joins the buses.
    """

    def _make(
        line_cap: float = 60.0,
        g2_cap: float = 50.0,
        candidates: tuple[ConventionalUnit, ...] = (),
        line_for: float = 0.0,
        g1_for: float = 0.0,
        **config,
    ) -> SystemModel:
        return _model(
            {1: 0.0, 2: 100.0},
            [("l1", 1, 2, 10.0, line_cap, line_for)],
            [
                unit("G1", 1, 150.0, 10.0, for_rate=g1_for),
                unit("G2", 2, g2_cap, 30.0, owned=True),
                *candidates,
            ],
            **config,
        )

    return _make


@pytest.fixture
def candidate_model(make_two_bus):
    """Two-bus system with one 20 MW candidate at $5/MWh that may go to n1 or n2."""
    return make_two_bus(
        candidates=(
            unit("C1", None, 20.0, 5.0, candidate_buses=(1, 2), invest=10_000.0),
        )
    )


@pytest.fixture
def make_triangle():
    """Factory for a triangle where a 2 MW line strands the load at n2.

    G1 ($10) sits at n1, the 50 MW load at n2, and n3 has neither. The weak 3-2 line
    makes an injection at n3 worth eleven delivered MW at n2.
    """

    def _make(candidates: tuple[ConventionalUnit, ...] = (), **config) -> SystemModel:
        return _model(
            {1: 0.0, 2: 50.0, 3: 0.0},
            [
                ("l1", 1, 2, 10.0, 100.0, 0.0),
                ("l2", 1, 3, 10.0, 2.0, 0.0),
                ("l3", 3, 2, 1.0, 100.0, 0.0),
            ],
            [unit("G1", 1, 200.0, 10.0), *candidates],
            **config,
        )

    return _make


@pytest.fixture
def make_random_system():
    """Factory for small random three-bus planning instances."""

    def _make(seed: int, n_candidates: int = 2, **config) -> SystemModel:
        rng = np.random.default_rng(seed)
        peaks = {n: float(rng.integers(20, 80)) for n in (1, 2, 3)}
        lines = [
            ("l1", 1, 2, 10.0, float(rng.integers(30, 90)), 0.0),
            ("l2", 2, 3, 10.0, float(rng.integers(30, 90)), 0.0),
            ("l3", 1, 3, 10.0, float(rng.integers(30, 90)), 0.0),
        ]
        units = [
            unit("G1", 1, 120.0, float(rng.integers(8, 15))),
            unit("G2", 3, 60.0, float(rng.integers(20, 40)), owned=True),
        ]
        for i in range(n_candidates):
            units.append(
                unit(
                    f"C{i + 1}",
                    None,
                    float(rng.integers(10, 40)),
                    float(rng.integers(5, 25)),
                    candidate_buses=(2, 3),
                    invest=float(rng.integers(0, 20_000)),
                )
            )
        blocks = [LoadBlock(1, 0.6, 60.0), LoadBlock(2, 1.0, 40.0)]
        return _model(peaks, lines, units, blocks, **config)

    return _make


@pytest.fixture
def make_random_study(curve):
    """Factory for random ring systems with a matching scenario set.

    Every bus carries load. `seed % 4` picks the flavour: 0 the base case only,
    1 N-1 outages of two lines and the GENCO unit, 2 three wind scenarios with a
    candidate wind farm, 3 one line outage crossed with two wind scenarios.
    Returns `(model, scenarios)`.
    """

    def _make(seed: int) -> tuple[SystemModel, ScenarioSet]:
        rng = np.random.default_rng(seed)
        flavour = seed % 4
        n_buses = int(rng.integers(3, 6))
        buses = list(range(1, n_buses + 1))
        peaks = {n: float(rng.integers(10, 40)) for n in buses}

        failing = set()
        if flavour == 1:
            failing = {f"l{i}" for i in rng.choice(buses, 2, replace=False)}
        elif flavour == 3:
            failing = {f"l{rng.integers(1, n_buses + 1)}"}
        lines = []
        for i in buses:
            ends = (i, i + 1) if i < n_buses else (1, n_buses)
            lid = f"l{i}"
            lines.append(
                (
                    lid,
                    *ends,
                    float(rng.integers(5, 16)),
                    float(rng.integers(60, 150)),
                    0.02 if lid in failing else 0.0,
                )
            )

        units = [
            unit("G1", 1, 2.0 * sum(peaks.values()), float(rng.integers(8, 15))),
            unit(
                "G2",
                n_buses,
                float(rng.integers(30, 60)),
                float(rng.integers(20, 40)),
                owned=True,
                for_rate=0.05 if flavour == 1 else 0.0,
            ),
        ]
        with_wind = flavour in (2, 3)
        costs = rng.choice(np.arange(5, 25), 2, replace=False)
        for i in range(1 if with_wind else 2):
            units.append(
                unit(
                    f"C{i + 1}",
                    None,
                    float(rng.integers(10, 40)),
                    float(costs[i]),
                    candidate_buses=tuple(
                        sorted(int(n) for n in rng.choice(buses, 2, replace=False))
                    ),
                    invest=float(rng.integers(0, 20_000)),
                )
            )
        farms = []
        if with_wind:
            farms.append(
                WindFarm(
                    id="W1",
                    bus=None,
                    n_turbines=int(rng.integers(4, 13)),
                    owned_by_genco=True,
                    curve=curve,
                    candidate_buses=tuple(
                        sorted(int(n) for n in rng.choice(buses, 2, replace=False))
                    ),
                    annual_invest_cost=float(rng.integers(0, 20_000)),
                )
            )

        n_blocks = {0: 3, 1: 2, 2: 2, 3: 1}[flavour]
        n_blocks = int(rng.integers(1, n_blocks + 1))
        levels = sorted(np.round(rng.uniform(0.5, 1.0, n_blocks), 2), reverse=True)
        blocks = [
            LoadBlock(b + 1, float(level), float(rng.integers(10, 60)))
            for b, level in enumerate(levels)
        ]
        model = _model(peaks, lines, units, blocks, wind=farms)

        scenarios = enumerate_n_minus_1(model)
        if with_wind:
            speeds = pd.DataFrame(
                {n: np.round(rng.uniform(2.0, 20.0, 5 - flavour), 1) for n in buses}
            )
            wind = wind_scenarios_from_speeds(speeds, curve)
            scenarios = combine(scenarios, wind, model.config.max_scenarios)
        return model, scenarios

    return _make


@pytest.fixture
def curve() -> PowerCurve:
    """2.5 MW turbine: cut-in 3 m/s, rated 15 m/s, cut-out 25 m/s."""
    return PowerCurve(
        (0.0, 3.0, 9.0, 15.0, 25.0),
        (0.0, 0.0, 1.0, 2.5, 2.5),
    )


@pytest.fixture
def make_wind_model(curve):
    """Factory for a two-bus system whose GENCO owns only candidate wind farms."""

    def _make(sites: tuple[int, ...] = (2,), n_turbines: int = 10, **config):
        farms = [
            WindFarm(
                id="WC1",
                bus=None,
                n_turbines=n_turbines,
                owned_by_genco=True,
                curve=curve,
                candidate_buses=sites,
                annual_invest_cost=1_000.0,
            )
        ]
        return _model(
            {1: 0.0, 2: 100.0},
            [("l1", 1, 2, 10.0, 60.0, 0.0)],
            [unit("G1", 1, 150.0, 10.0), unit("G2", 2, 50.0, 30.0)],
            wind=farms,
            **config,
        )

    return _make


@pytest.fixture
def rival_wind_model(curve):
    """One price zone with a rival 20-turbine farm at n1 and the GENCO's candidate.

    The 100 MW load sits at n2. G1 ($10, 60 MW) and G2 ($30) belong to rivals, so
    the price is $30/MWh while wind stays under 40 MW and $10/MWh above. The
    10-turbine candidate may go to n1 or n2.
    """
    farms = [
        WindFarm(id="WR", bus=1, n_turbines=20, owned_by_genco=False, curve=curve),
        WindFarm(
            id="WC1",
            bus=None,
            n_turbines=10,
            owned_by_genco=True,
            curve=curve,
            candidate_buses=(1, 2),
            annual_invest_cost=1_000.0,
        ),
    ]
    return _model(
        {1: 0.0, 2: 100.0},
        [("l1", 1, 2, 10.0, 200.0, 0.0)],
        [unit("G1", 1, 60.0, 10.0), unit("G2", 2, 100.0, 30.0)],
        wind=farms,
    )


@pytest.fixture
def base_set():
    return base_scenario_set()


@pytest.fixture
def saved_system(tmp_path, candidate_model):
    """Candidate model written in the canonical CSV layout."""
    directory = tmp_path / "system"
    save_system(candidate_model, directory)
    return directory


@pytest.fixture(scope="session")
def rts24():
    """The bundled RTS-24 system with default settings."""
    return load_system(RTS24_DIR)
