"""Unit tests for filesystem utilities."""

from unittest.mock import patch

import pandas as pd
import pytest
import tomli_w

from gep_planner.common.exceptions import DataNotFoundError, DataValidationError
from gep_planner.common.filesystem import (
    RTS24_DIR,
    get_version,
    read_table,
    write_table,
)

FILESYSTEM_MODULE = "gep_planner.common.filesystem"


@pytest.fixture
def sample_df() -> pd.DataFrame:
    """Provides a small table with a float and an empty cell."""
    return pd.DataFrame({"id": ["a", "b"], "value": [1.5, None]})


class TestGetVersion:
    """Tests for get_version function."""

    def test_get_version_success(self, tmp_path):
        """Tests successful version retrieval from pyproject.toml."""
        # Given
        mock_toml = {"tool": {"poetry": {"version": "1.0.0"}}}
        with open(tmp_path / "pyproject.toml", "wb") as f:
            tomli_w.dump(mock_toml, f)

        with patch(f"{FILESYSTEM_MODULE}.PROJECT_ROOT", tmp_path):
            # When
            version = get_version()

        # Then
        assert version == "1.0.0"

    def test_get_version_file_not_found(self, tmp_path):
        """Tests fallback version when pyproject.toml is not found."""
        with patch(f"{FILESYSTEM_MODULE}.PROJECT_ROOT", tmp_path / "nonexistent"):
            # When
            version = get_version()

        # Then
        assert version == "0.0.0"


class TestReadTable:
    """Tests for the tabular input reader."""

    @pytest.mark.parametrize("suffix", [".csv", ".parquet"])
    def test_reads_cells_as_strings(self, tmp_path, suffix):
        """Both formats come back as string cells."""
        # Given
        path = tmp_path / f"table{suffix}"
        df = pd.DataFrame({"id": [1, 2], "peak_load": [10.5, 20.0]})
        if suffix == ".csv":
            df.to_csv(path, index=False)
        else:
            df.to_parquet(path)

        # When
        table = read_table(path)

        # Then
        assert list(table.columns) == ["id", "peak_load"]
        assert table["id"].tolist() == ["1", "2"]

    def test_empty_csv_cells_stay_empty(self, tmp_path):
        """Blank cells are empty strings, not NaN."""
        # Given
        path = tmp_path / "units.csv"
        path.write_text("id,bus\nC1,\n")

        # When
        table = read_table(path)

        # Then
        assert table.at[0, "bus"] == ""

    def test_missing_required_file(self, tmp_path):
        """A missing required file raises DataNotFoundError."""
        with pytest.raises(DataNotFoundError, match="not found"):
            read_table(tmp_path / "buses.csv")

    def test_missing_optional_file(self, tmp_path):
        """A missing optional file returns None."""
        assert read_table(tmp_path / "wind.csv", required=False) is None

    def test_unsupported_extension(self, tmp_path):
        """Unknown extensions are rejected."""
        # Given
        path = tmp_path / "buses.xlsx"
        path.write_text("")

        # When/Then
        with pytest.raises(DataValidationError, match="Unsupported file extension"):
            read_table(path)


class TestWriteTable:
    """Tests for the output table writer."""

    def test_creates_parent_directories(self, tmp_path, sample_df):
        """Nested output directories are created on demand."""
        # Given
        path = tmp_path / "a" / "b" / "out.csv"

        # When
        write_table(sample_df, path)

        # Then
        assert path.read_text() == "id,value\na,1.5\nb,\n"

    def test_missing_marker(self, tmp_path, sample_df):
        """Missing cells use the requested marker."""
        # When
        path = write_table(sample_df, tmp_path / "out.csv", na_rep="-")

        # Then
        assert path.read_text().splitlines()[-1] == "b,-"


def test_bundled_dataset_location():
    """The bundled RTS-24 directory ships the four core tables."""
    for name in ("buses.csv", "lines.csv", "units.csv", "blocks.csv"):
        assert (RTS24_DIR / name).is_file()
