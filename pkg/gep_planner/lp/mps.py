"""Fixed-format MPS export for cross-checking models with external solvers."""

import math
from pathlib import Path

from gep_planner.common.logging_config import setup_logger
from gep_planner.lp.problem import LinearProgram, Relation, Sense

# Configure logging
log = setup_logger(__name__)

_ROW_TYPE = {Relation.LE: "L", Relation.EQ: "E", Relation.GE: "G"}
_OBJ = "OBJ"


def _number(value: float) -> str:
    """Shortest representation of `value` fitting the 12-character field."""
    for digits in range(12, 0, -1):
        text = f"{value:.{digits}g}"
        if len(text) <= 12:
            return text
    return f"{value:.1e}"


def _field_line(code: str, name: str, entries: list[tuple[str, float]]) -> str:
    line = f" {code:<2} {name:<8}"
    for i, (other, value) in enumerate(entries):
        pad = "  " if i == 0 else "   "
        line += f"{pad}{other:<8}  {_number(value):>12}"
    return line.rstrip()


def _row_id(i: int) -> str:
    return f"R{i + 1:07d}"


def _col_id(j: int) -> str:
    return f"C{j + 1:07d}"


def write_mps(problem: LinearProgram, path: Path) -> Path:
    """Write `problem` in fixed MPS layout.

    Names are replaced by the fixed-width ids R0000001 / C0000001 and the original
    names are listed in comment lines, so any model fits the 8-character fields.
    The objective constant is written as a comment since fixed MPS has no slot
    for it.
    """
    lines = [f"* {path.stem}: {problem.n_rows} rows, {problem.n_cols} columns"]
    if problem.offset:
        lines.append(f"* objective offset {problem.offset!r}")
    for i in range(problem.n_rows):
        lines.append(f"* {_row_id(i)} {problem.row_name(i)}")
    for j in range(problem.n_cols):
        lines.append(f"* {_col_id(j)} {problem.col_name(j)}")

    lines.append(f"NAME          {path.stem[:8].upper()}")
    if problem.sense is Sense.MAX:
        lines += ["OBJSENSE", "    MAX"]

    lines.append("ROWS")
    lines.append(f" N  {_OBJ}")
    for i, rel in enumerate(problem.relations):
        lines.append(f" {_ROW_TYPE[rel]}  {_row_id(i)}")

    lines.append("COLUMNS")
    csc = problem.A.tocsc()
    for j in range(problem.n_cols):
        entries = []
        if problem.c[j]:
            entries.append((_OBJ, float(problem.c[j])))
        start, end = csc.indptr[j], csc.indptr[j + 1]
        for i, value in zip(csc.indices[start:end], csc.data[start:end]):
            if value:
                entries.append((_row_id(int(i)), float(value)))
        if not entries:
            # keep empty columns visible to the reader
            entries.append((_OBJ, 0.0))
        for k in range(0, len(entries), 2):
            lines.append(_field_line("", _col_id(j), entries[k : k + 2]))

    lines.append("RHS")
    rhs = [(_row_id(i), float(v)) for i, v in enumerate(problem.b) if v]
    for k in range(0, len(rhs), 2):
        lines.append(_field_line("", "RHS", rhs[k : k + 2]))

    bounds = []
    for j in range(problem.n_cols):
        lo, hi = float(problem.lb[j]), float(problem.ub[j])
        name = _col_id(j)
        if lo == hi:
            bounds.append(_field_line("FX", "BND", [(name, lo)]))
            continue
        if math.isinf(lo) and math.isinf(hi):
            bounds.append(f" FR BND       {name}")
            continue
        if math.isinf(lo):
            bounds.append(f" MI BND       {name}")
        elif lo != 0.0:
            bounds.append(_field_line("LO", "BND", [(name, lo)]))
        if not math.isinf(hi):
            bounds.append(_field_line("UP", "BND", [(name, hi)]))
    if bounds:
        lines.append("BOUNDS")
        lines += bounds
    lines.append("ENDATA")

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    log.debug(f"Wrote MPS model {path} ({problem.n_rows}×{problem.n_cols})")
    return path
