"""
Intended for running the forced-outage study on the bundled RTS-24 data
without going through the command line
"""

from gep_planner.common.exceptions import CapExceededError, ModelingError
from gep_planner.common.filesystem import FAILURE_STUDY_DIR, PROJECT_ROOT, RTS24_DIR
from gep_planner.common.logging_config import setup_logger
from gep_planner.cli.outputs import write_study_table
from gep_planner.planner.studies import run_failure_study
from gep_planner.system.config import load_config
from gep_planner.system.data_loader import load_system

# Configure logging
log = setup_logger(__name__)

# A coarse load curve keeps the oracle sweep to minutes
BLOCKS = 4
COSTS = [float(c) for c in range(15, 25)]

try:
    config = load_config(FAILURE_STUDY_DIR / "study.toml", coarsen_blocks=BLOCKS)
    model = load_system(
        RTS24_DIR, config, candidates=FAILURE_STUDY_DIR / "candidates.csv"
    )

    table = run_failure_study(model, COSTS, mode="oracle")

    # Failures can only make the re-priced no-failure plan look worse
    valid = table["delta (%)"].dropna()
    assert (valid >= -1e-4).all(), "full-set plan below the no-failure plan"

    path = write_study_table(table, PROJECT_ROOT / "results" / "failure_study.csv")
    log.info(f"Study complete:\n{table.to_string(index=False, na_rep='-')}")
    log.info(f"Written to {path}")

except CapExceededError as e:
    log.error(f"Failure Study Failed: {str(e)}")
    log.error("Lower the number of load blocks or raise max_plans in study.toml.")
except ModelingError as e:
    log.error(f"Failure Study Failed: {str(e)}")
