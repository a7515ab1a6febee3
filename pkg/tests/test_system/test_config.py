"""Unit tests for the study configuration."""

import pytest

from gep_planner.common.exceptions import DataNotFoundError, DataValidationError
from gep_planner.common.filesystem import FAILURE_STUDY_DIR, MULTIYEAR_STUDY_DIR
from gep_planner.system.config import StudyConfig, load_config


class TestLoadConfig:
    """Tests for load_config."""

    def test_defaults_without_file(self):
        # When
        config = load_config()

        # Then
        assert config == StudyConfig()
        assert config.voll == 1000.0
        assert config.years == 1

    def test_file_and_overrides(self, tmp_path):
        """Non-None overrides win over the file; None overrides are ignored."""
        # Given
        path = tmp_path / "study.toml"
        path.write_text("years = 3\nseed = 4\n\n[tolerances]\nfeas_tol = 1e-8\n")

        # When
        config = load_config(path, seed=7, threads=None)

        # Then
        assert config.years == 3
        assert config.seed == 7
        assert config.threads == 1
        assert config.tolerances.feas_tol == 1e-8

    @pytest.mark.parametrize(
        "text",
        [
            "years = 0\n",
            "voll = -1\n",
            "unknown_key = 1\n",
            "years = \n",
        ],
    )
    def test_invalid_files(self, tmp_path, text):
        # Given
        path = tmp_path / "study.toml"
        path.write_text(text)

        # When/Then
        with pytest.raises(DataValidationError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataNotFoundError, match="Config file not found"):
            load_config(tmp_path / "missing.toml")

    @pytest.mark.parametrize("directory", [FAILURE_STUDY_DIR, MULTIYEAR_STUDY_DIR])
    def test_bundled_study_configs_load(self, directory):
        """The study configs shipped with the data are valid."""
        assert load_config(directory / "study.toml").voll == 1000.0


class TestDiscountFactor:
    """Tests for StudyConfig.discount_factor."""

    @pytest.mark.parametrize(
        "rate,year,expected",
        [
            (0.0, 1, 1.0),
            (0.0, 5, 1.0),
            (0.1, 1, 1 / 1.1),
            (0.05, 2, 1 / 1.05**2),
        ],
    )
    def test_discount_factor(self, rate, year, expected):
        assert StudyConfig(discount_rate=rate).discount_factor(year) == pytest.approx(
            expected
        )
