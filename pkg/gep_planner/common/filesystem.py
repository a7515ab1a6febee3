"""Utilities for file system operations and bundled data management.

This module locates the bundled RTS-24 dataset, reads tabular inputs in the
formats the planner accepts and writes output tables with a stable layout.
"""

from pathlib import Path
from typing import Final

import pandas as pd
import tomli

from gep_planner.common.exceptions import DataNotFoundError, DataValidationError
from gep_planner.common.logging_config import setup_logger

# Configure logging
log = setup_logger(__name__)

PROJECT_ROOT: Final[Path] = Path(__file__).parents[2]
DATA_DIR: Final[Path] = PROJECT_ROOT / "data"

RTS24_DIR: Final[Path] = DATA_DIR / "rts24"
FAILURE_STUDY_DIR: Final[Path] = RTS24_DIR / "failure_study"
MULTIYEAR_STUDY_DIR: Final[Path] = RTS24_DIR / "multiyear_study"
WIND_STUDY_DIR: Final[Path] = RTS24_DIR / "wind_study"

SUPPORTED_EXTENSIONS: Final[tuple[str, ...]] = (".csv", ".parquet")


def get_version() -> str:
    """Read and return the package version from pyproject.toml.

    Returns:
        str: The version string from pyproject.toml, or '0.0.0' if reading fails
    """
    try:
        pyproject_path = PROJECT_ROOT / "pyproject.toml"
        with open(pyproject_path, "rb") as f:
            pyproject_data = tomli.load(f)
        return pyproject_data["tool"]["poetry"]["version"]
    except (FileNotFoundError, KeyError, tomli.TOMLDecodeError) as e:
        log.warning(f"Failed to read version from pyproject.toml: {e}")
        return "0.0.0"


def read_table(path: Path, required: bool = True) -> pd.DataFrame | None:
    """Read a CSV or parquet table into a DataFrame.

    Args:
        path: File to read. The extension selects the reader.
        required: When False a missing file returns None instead of raising.

    Returns:
        The loaded DataFrame, or None for a missing optional file.

    Raises:
        DataNotFoundError: If a required file does not exist.
        DataValidationError: If the extension is unsupported or parsing fails.
    """
    if not path.exists():
        if required:
            raise DataNotFoundError(f"Required input file not found: {path}")
        return None

    suffix = path.suffix.lower()
    try:
        if suffix == ".csv":
            return pd.read_csv(
                path, dtype=str, keep_default_na=False, skipinitialspace=True
            )
        if suffix == ".parquet":
            return pd.read_parquet(path).astype(str)
    except (pd.errors.ParserError, ValueError, OSError) as e:
        raise DataValidationError(f"{path.name}: {e}") from e
    raise DataValidationError(
        f"Unsupported file extension: {suffix} (expected one of {SUPPORTED_EXTENSIONS})"
    )


def write_table(df: pd.DataFrame, path: Path, na_rep: str = "") -> Path:
    """Write a DataFrame as CSV with a deterministic float representation."""
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, lineterminator="\n", na_rep=na_rep)
    log.debug(f"Wrote {len(df)} rows to {path}")
    return path
