"""
Intended for generating the correlated wind scenarios of the wind study
and checking how close their correlations come to the targets
"""

import numpy as np

from gep_planner.common.exceptions import CorrelationError, DataValidationError
from gep_planner.common.filesystem import PROJECT_ROOT, WIND_STUDY_DIR, write_table
from gep_planner.common.logging_config import setup_logger
from gep_planner.scenarios.wind import (
    correlation_matrix,
    decorrelate,
    load_correlation_targets,
    load_marginals,
    synthesize_correlated_wind,
)
from gep_planner.system.data_loader import load_power_curve

# Configure logging
log = setup_logger(__name__)

N_SCENARIOS = 200
SEED = 0

try:
    targets = load_correlation_targets(WIND_STUDY_DIR / "correlations.csv")
    marginals = load_marginals(WIND_STUDY_DIR / "marginals.csv")
    curve = load_power_curve(WIND_STUDY_DIR / "curve.csv")

    correlated = synthesize_correlated_wind(targets, marginals, N_SCENARIOS, SEED, curve)
    independent = decorrelate(correlated, SEED)

    # Sample correlations should land near the targets
    sample = correlation_matrix(correlated)
    error = np.abs(sample.to_numpy() - targets.to_numpy()).max()
    log.info(f"Largest deviation from the target correlations: {error:.3f}")

    out = PROJECT_ROOT / "results"
    write_table(correlated.to_frame(), out / "wind_correlated.csv")
    write_table(independent.to_frame(), out / "wind_independent.csv")
    log.info(f"Sample correlations:\n{sample.round(3)}")
    log.info(f"After decorrelation:\n{correlation_matrix(independent).round(3)}")

except (CorrelationError, DataValidationError) as e:
    log.error(f"Wind Scenario Generation Failed: {str(e)}")
