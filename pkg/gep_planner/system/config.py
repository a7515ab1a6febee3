"""Study configuration.

A study is configured by a TOML file whose keys map onto `StudyConfig`. Solver
tolerances live in a nested `[tolerances]` table. Every key is optional.
"""

from pathlib import Path
from typing import Optional

import tomli
from pydantic import BaseModel, Field, ValidationError, model_validator

from gep_planner.common.exceptions import DataNotFoundError, DataValidationError
from gep_planner.common.logging_config import setup_logger

# Configure logging
log = setup_logger(__name__)


class SolverTolerances(BaseModel):
    """Numerical tolerances shared by the simplex, KKT checks and branch-and-bound."""

    feas_tol: float = Field(1e-7, gt=0, description="Primal feasibility tolerance")
    duality_tol: float = Field(1e-6, gt=0, description="Relative duality gap tolerance")
    comp_tol: float = Field(1e-6, gt=0, description="Complementarity tolerance")
    pivot_tol: float = Field(1e-9, gt=0, description="Smallest acceptable pivot")
    integrality_tol: float = Field(1e-6, gt=0, description="Binary rounding tolerance")
    refactor_every: int = Field(100, ge=1, description="Pivots between refactorizations")
    stall_window: int = Field(
        50, ge=1, description="Non-improving pivots before switching to Bland's rule"
    )
    max_condition: float = Field(
        1e13, gt=1, description="Basis 1-norm condition number considered singular"
    )
    max_iterations: int = Field(200_000, ge=1, description="Simplex iteration cap")

    model_config = {"frozen": True, "extra": "forbid"}


class StudyConfig(BaseModel):
    """Planning horizon, market parameters and solver controls for one study."""

    years: int = Field(1, ge=1, description="Planning horizon length in years")
    growth: float = Field(0.0, ge=-0.99, description="Yearly demand growth fraction")
    discount_rate: float = Field(0.0, ge=0, description="Yearly discount rate r")
    voll: float = Field(1000.0, gt=0, description="Value of lost load V^L in $/MWh")
    slack_bus: int = Field(1, ge=1, description="Bus whose angle is pinned to zero")
    line_for_default: float = Field(
        0.02, ge=0, lt=1, description="Forced outage rate of lines without one"
    )
    candidate_for_default: float = Field(
        0.04, ge=0, lt=1, description="Forced outage rate of candidate units without one"
    )
    seed: int = Field(0, ge=0, description="Seed for every random draw of the run")
    threads: int = Field(1, ge=1, description="Worker cap for clearing, oracle and BnB")

    max_scenarios: int = Field(10_000, ge=1, description="Cap on scenario set size")
    max_plans: int = Field(100_000, ge=1, description="Cap on oracle enumeration")
    max_outages: int = Field(1, ge=1, description="Simultaneous outages enumerated")
    decorrelation_threshold: float = Field(
        0.1, gt=0, le=1, description="Largest |rho| accepted after decorrelation"
    )
    decorrelation_max_tries: int = Field(200, ge=1, description="Permutation retries")

    big_m_factor: float = Field(
        2.0, ge=1, description="Price bound as a multiple of V^L"
    )
    mip_gap: float = Field(0.0, ge=0, description="Relative gap at which BnB stops")
    time_limit: Optional[float] = Field(None, gt=0, description="BnB time limit in s")
    strict_big_m: bool = Field(
        True, description="Fail when a linearization bound is active at the optimum"
    )
    exploit_symmetry: bool = Field(
        True, description="Order interchangeable candidates to remove mirror plans"
    )
    literal_slack_dual: bool = Field(
        False, description="Place the slack angle dual in every bus angle dual row"
    )

    invest_per_kw_unit: float = Field(400.0, gt=0, description="$/kW of new units")
    invest_per_kw_wind: float = Field(1000.0, gt=0, description="$/kW of new farms")
    payback_years: float = Field(40.0, gt=0, description="Investment payback period")
    coarsen_blocks: Optional[int] = Field(
        None, ge=1, description="Merge load blocks into this many groups"
    )
    max_dense_bytes: int = Field(
        2_000_000_000, ge=1, description="Memory budget of a dense LP matrix"
    )

    tolerances: SolverTolerances = Field(default_factory=SolverTolerances)

    @model_validator(mode="after")
    def validate_horizon(self) -> "StudyConfig":
        """Reject growth that would drive loads to zero within the horizon."""
        if self.years > 1 and (1 + self.growth) <= 0:
            raise ValueError("growth must keep loads positive over the horizon")
        return self

    model_config = {
        "frozen": True,
        "extra": "forbid",
        "json_schema_extra": {
            "example": {
                "years": 3,
                "growth": 0.05,
                "discount_rate": 0.03,
                "voll": 1000.0,
                "tolerances": {"feas_tol": 1e-7},
            }
        },
    }

    def discount_factor(self, year: int) -> float:
        """1/(1+r)^y with years counted from 1."""
        return 1.0 / (1.0 + self.discount_rate) ** year


def load_config(path: Optional[Path] = None, **overrides) -> StudyConfig:
    """Load a StudyConfig from a TOML file, then apply non-None overrides.

    Raises:
        DataNotFoundError: If the file does not exist.
        DataValidationError: If the TOML is malformed or a value is out of range.
    """
    data: dict = {}
    if path is not None:
        if not path.exists():
            raise DataNotFoundError(f"Config file not found: {path}")
        try:
            with open(path, "rb") as f:
                data = tomli.load(f)
        except tomli.TOMLDecodeError as e:
            raise DataValidationError(f"{path.name}: {e}") from e
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = StudyConfig(**data)
    except ValidationError as e:
        raise DataValidationError(f"Invalid study configuration: {e}") from e
    log.debug(f"Loaded config {config.model_dump(mode='json')}")
    return config
