"""Unit tests for the MPS writer."""

import math

import pytest

from gep_planner.lp.mps import _number, write_mps
from gep_planner.lp.problem import LinExpr, LpBuilder, Relation, Sense


@pytest.fixture
def problem():
    lp = LpBuilder("tiny")
    x = lp.add_col("x", 0.0, 4.0, 1.0)
    y = lp.add_col("y", -math.inf, math.inf, -2.0)
    z = lp.add_col("z", 1.0, 1.0)
    lp.add_row(LinExpr({x: 1.0, y: 1.0}), Relation.LE, 5.0, "cap")
    lp.add_row(LinExpr({y: 1.0, z: -1.0}), Relation.EQ, 0.0, "link")
    lp.add_row(LinExpr({x: 1.0}), Relation.GE, -1.5, "floor")
    return lp.build(Sense.MAX)


class TestWriteMps:
    """Tests for write_mps."""

    def test_sections(self, problem, tmp_path):
        # When
        text = write_mps(problem, tmp_path / "tiny.mps").read_text()
        lines = text.splitlines()

        # Then
        sections = [ln for ln in lines if ln and not ln.startswith((" ", "*"))]
        assert sections == [
            "NAME          TINY",
            "OBJSENSE",
            "ROWS",
            "COLUMNS",
            "RHS",
            "BOUNDS",
            "ENDATA",
        ]
        assert " L  R0000001" in lines
        assert " E  R0000002" in lines
        assert " G  R0000003" in lines
        assert "* C0000002 y" in lines

    def test_bounds(self, problem, tmp_path):
        # When
        lines = write_mps(problem, tmp_path / "tiny.mps").read_text().splitlines()

        # Then
        bounds = lines[lines.index("BOUNDS") + 1 : lines.index("ENDATA")]
        assert bounds[0].split() == ["UP", "BND", "C0000001", "4"]
        assert bounds[1].split() == ["FR", "BND", "C0000002"]
        assert bounds[2].split() == ["FX", "BND", "C0000003", "1"]

    def test_rhs_skips_zeros(self, problem, tmp_path):
        # When
        lines = write_mps(problem, tmp_path / "tiny.mps").read_text().splitlines()

        # Then
        rhs = lines[lines.index("RHS") + 1 : lines.index("BOUNDS")]
        assert [ln.split() for ln in rhs] == [
            ["RHS", "R0000001", "5", "R0000003", "-1.5"]
        ]


@pytest.mark.parametrize("value", [1.0, -1.5, 1 / 3, 123456789.123, -1e-300, 6.02e23])
def test_number_fits_field(value):
    text = _number(value)
    assert len(text) <= 12
    assert float(text) == pytest.approx(value, rel=1e-6)
