"""
Wind scenarios: speed-to-power conversion, correlation estimates, a Gaussian-copula
generator for synthetic correlated sites, and decorrelation by per-site permutation.

Sites are identified by the id of the bus they feed. A wind scenario carries the
speed at every site and the matching single-turbine output; farm power is the
turbine count times that output.
"""

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from scipy.stats import norm, weibull_min

from gep_planner.common.exceptions import (
    CorrelationError,
    DataValidationError,
    MissingColumnsError,
)
from gep_planner.common.filesystem import read_table
from gep_planner.common.logging_config import setup_logger
from gep_planner.scenarios.types import (
    AvailabilityScenario,
    Scenario,
    ScenarioSet,
    WindScenario,
    normalized,
)
from gep_planner.system.model import PowerCurve, WindFarm

# Configure logging
log = setup_logger(__name__)

_BASE = AvailabilityScenario("base")


def wind_power(farm: WindFarm, wind_speed: float) -> float:
    """Available farm power N^T · P^{W,1}(speed) in MW."""
    return farm.n_turbines * farm.curve(wind_speed)


def _parse_site(column: str) -> int:
    text = str(column).strip().lower().removeprefix("n")
    try:
        return int(text)
    except ValueError as e:
        raise DataValidationError(f"wind speed column {column!r} is not a bus id") from e


def _wind_set(
    speeds: np.ndarray, sites: Sequence[int], curve: PowerCurve, prefix: str = "w"
) -> ScenarioSet:
    """Equiprobable scenario set from an (n_scenarios × n_sites) speed matrix."""
    n = speeds.shape[0]
    width = len(str(n))
    scenarios = []
    for i in range(n):
        label = f"{prefix}{i + 1:0{width}d}"
        row = {site: float(speeds[i, j]) for j, site in enumerate(sites)}
        wind = WindScenario(
            label=label,
            speeds=row,
            turbine_power={site: curve(v) for site, v in row.items()},
            probability=1.0 / n,
        )
        scenarios.append(Scenario(label, 1.0 / n, _BASE, wind))
    return normalized(scenarios)


def load_wind_speeds(path: Path) -> pd.DataFrame:
    """Read a wind speed table: one row per scenario, one column per site (m/s)."""
    df = read_table(path)
    assert df is not None
    try:
        table = df.astype(float)
    except ValueError as e:
        raise DataValidationError(
            f"{path.name}: wind speeds must be numeric: {e}"
        ) from e
    table.columns = [_parse_site(c) for c in df.columns]
    return table


def wind_scenarios_from_speeds(table: pd.DataFrame, curve: PowerCurve) -> ScenarioSet:
    """Turn a wind speed table into equiprobable wind scenarios."""
    if table.empty:
        raise DataValidationError("wind speed table has no scenarios")
    speeds = table.to_numpy(dtype=float)
    if np.any(speeds < 0) or not np.all(np.isfinite(speeds)):
        raise DataValidationError("wind speeds must be finite and nonnegative")
    sites = [int(c) for c in table.columns]
    result = _wind_set(speeds, sites, curve)
    log.info(f"Built {len(result)} wind scenarios for sites {sites}")
    return result


def _speed_matrix(scenarios: ScenarioSet) -> tuple[np.ndarray, tuple[int, ...]]:
    sites = scenarios.sites
    if not sites:
        raise DataValidationError("scenario set carries no wind data")
    matrix = np.array(
        [
            [s.wind.speeds[site] for site in sites]
            for s in scenarios
            if s.wind is not None
        ]
    )
    return matrix, sites


def estimate_correlation(scenarios: ScenarioSet, site_a: int, site_b: int) -> float:
    """Probability-weighted Pearson correlation of the wind speed at two sites.

    Raises:
        CorrelationError: With fewer than two scenarios or a site of zero variance.
    """
    if len(scenarios) < 2:
        raise CorrelationError("correlation needs at least two scenarios")
    matrix, sites = _speed_matrix(scenarios)
    for site in (site_a, site_b):
        if site not in sites:
            raise CorrelationError(f"no wind data for site n{site}")
    weights = np.asarray(scenarios.probabilities)
    x = matrix[:, sites.index(site_a)]
    y = matrix[:, sites.index(site_b)]
    dx = x - weights @ x
    dy = y - weights @ y
    var_x = float(weights @ (dx * dx))
    var_y = float(weights @ (dy * dy))
    if var_x <= 0 or var_y <= 0:
        raise CorrelationError(
            f"correlation of n{site_a} and n{site_b} is undefined: zero variance"
        )
    if site_a == site_b:
        return 1.0
    rho = float(weights @ (dx * dy)) / np.sqrt(var_x * var_y)
    return float(np.clip(rho, -1.0, 1.0))


def correlation_matrix(scenarios: ScenarioSet) -> pd.DataFrame:
    """Pairwise speed correlations; pairs involving a constant site are NaN."""
    _, sites = _speed_matrix(scenarios)
    values = np.full((len(sites), len(sites)), np.nan)
    for i, a in enumerate(sites):
        for j, b in enumerate(sites):
            try:
                values[i, j] = estimate_correlation(scenarios, a, b)
            except CorrelationError:
                continue
    return pd.DataFrame(values, index=list(sites), columns=list(sites))


def _max_off_diagonal(matrix: np.ndarray) -> float:
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(matrix, rowvar=False)
    corr = np.nan_to_num(corr, nan=0.0)
    np.fill_diagonal(corr, 0.0)
    return float(np.max(np.abs(corr)))


def decorrelate(
    scenarios: ScenarioSet,
    seed: int,
    threshold: float = 0.1,
    max_tries: int = 200,
) -> ScenarioSet:
    """Destroy cross-site correlation while keeping every site's values.

    Each site's column of (speed, turbine output) pairs is shuffled with its own
    seeded permutation; draws repeat until every pairwise |rho| of the speeds is at
    most `threshold`. A single-site set is returned unchanged.

    Raises:
        DataValidationError: With fewer than two scenarios or unequal probabilities.
        CorrelationError: If no permutation within `max_tries` meets the threshold.
    """
    matrix, sites = _speed_matrix(scenarios)
    if len(sites) < 2:
        log.info("Single wind site: decorrelation is a no-op")
        return scenarios
    if len(scenarios) < 2:
        raise DataValidationError("decorrelation needs at least two scenarios")
    uniform = 1.0 / len(scenarios)
    if not np.allclose(scenarios.probabilities, uniform, rtol=0, atol=1e-12):
        raise DataValidationError("decorrelation requires equiprobable scenarios")

    power = np.array(
        [[s.wind.turbine_power[site] for site in sites] for s in scenarios if s.wind]
    )
    rng = np.random.default_rng(seed)
    n = len(scenarios)
    for attempt in range(1, max_tries + 1):
        order = np.column_stack([rng.permutation(n) for _ in sites])
        shuffled = np.take_along_axis(matrix, order, axis=0)
        worst = _max_off_diagonal(shuffled)
        if worst <= threshold:
            shuffled_power = np.take_along_axis(power, order, axis=0)
            log.info(
                f"Decorrelated {n} scenarios over {len(sites)} sites in {attempt} "
                f"draw(s); max |rho| = {worst:.4f}"
            )
            result = []
            for i, s in enumerate(scenarios):
                wind = WindScenario(
                    label=f"{s.label}u",
                    speeds={site: float(shuffled[i, j]) for j, site in enumerate(sites)},
                    turbine_power={
                        site: float(shuffled_power[i, j]) for j, site in enumerate(sites)
                    },
                    probability=s.probability,
                )
                result.append(Scenario(wind.label, s.probability, s.availability, wind))
            return ScenarioSet(tuple(result))
        log.debug(f"Decorrelation draw {attempt}: max |rho| = {worst:.4f}")
    raise CorrelationError(
        f"no permutation within {max_tries} draws brought |rho| below {threshold}"
    )


def _check_correlation_matrix(target: np.ndarray) -> None:
    if target.ndim != 2 or target.shape[0] != target.shape[1]:
        raise CorrelationError("target correlation matrix must be square")
    if not np.allclose(target, target.T, atol=1e-9):
        raise CorrelationError("target correlation matrix must be symmetric")
    if not np.allclose(np.diag(target), 1.0, atol=1e-12):
        raise CorrelationError("target correlation matrix must have a unit diagonal")
    smallest = float(np.min(np.linalg.eigvalsh(target)))
    if smallest < -1e-10:
        raise CorrelationError(
            f"target correlation matrix is not positive semidefinite "
            f"(smallest eigenvalue {smallest:.3g})"
        )


def _copula_factor(target: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(target)
    except np.linalg.LinAlgError:
        # semidefinite: fall back to the symmetric square root
        values, vectors = np.linalg.eigh(target)
        return vectors * np.sqrt(np.clip(values, 0.0, None))


def synthesize_correlated_wind(
    target_correlations: pd.DataFrame,
    marginal_params: Mapping[int, tuple[float, float]],
    n_scenarios: int,
    seed: int,
    curve: PowerCurve,
) -> ScenarioSet:
    """Draw correlated wind speeds through a Gaussian copula and Weibull marginals.

    Args:
        target_correlations: Square frame indexed by site id on both axes.
        marginal_params: Site id → (Weibull shape k, scale c in m/s).
        n_scenarios: Number of equiprobable scenarios, at least 2.
        seed: Seed of the normal draws.
        curve: Single-turbine power curve applied to every speed.
    """
    if n_scenarios < 2:
        raise DataValidationError("at least two wind scenarios are required")
    sites = [int(s) for s in target_correlations.index]
    if [int(c) for c in target_correlations.columns] != sites:
        raise CorrelationError("target correlation axes must list the same sites")
    missing = [s for s in sites if s not in marginal_params]
    if missing:
        raise DataValidationError(f"no Weibull parameters for sites {missing}")

    target = target_correlations.to_numpy(dtype=float)
    _check_correlation_matrix(target)
    factor = _copula_factor(target)

    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_scenarios, len(sites))) @ factor.T
    u = np.clip(norm.cdf(z), 1e-12, 1 - 1e-12)
    shapes = np.array([marginal_params[s][0] for s in sites])
    scales = np.array([marginal_params[s][1] for s in sites])
    speeds = weibull_min.ppf(u, c=shapes, scale=scales)

    log.info(f"Synthesized {n_scenarios} correlated wind scenarios for sites {sites}")
    return _wind_set(speeds, sites, curve)


def load_correlation_targets(path: Path) -> pd.DataFrame:
    """Read pairwise targets (site_a, site_b, rho) and complete them symmetrically."""
    df = read_table(path)
    assert df is not None
    required = ("site_a", "site_b", "rho")
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise MissingColumnsError(path.name, missing, df.columns)
    pairs = {
        (int(a), int(b)): float(r)
        for a, b, r in zip(df["site_a"], df["site_b"], df["rho"])
    }
    sites = sorted({s for pair in pairs for s in pair})
    matrix = pd.DataFrame(np.eye(len(sites)), index=sites, columns=sites)
    for (a, b), rho in pairs.items():
        matrix.loc[a, b] = rho
        matrix.loc[b, a] = rho
    for i, a in enumerate(sites):
        for b in sites[i + 1 :]:
            if (a, b) not in pairs and (b, a) not in pairs:
                raise CorrelationError(f"{path.name}: no target for sites n{a}, n{b}")
    return matrix


def load_marginals(path: Path) -> dict[int, tuple[float, float]]:
    """Read Weibull marginals (site, shape, scale)."""
    df = read_table(path)
    assert df is not None
    required = ("site", "shape", "scale")
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise MissingColumnsError(path.name, missing, df.columns)
    return {
        int(site): (float(shape), float(scale))
        for site, shape, scale in zip(df["site"], df["shape"], df["scale"])
    }
