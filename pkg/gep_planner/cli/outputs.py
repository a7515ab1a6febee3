"""Output files and console tables of the command line."""

import json
from pathlib import Path
from typing import Mapping

import pandas as pd

from gep_planner.common.filesystem import write_table
from gep_planner.common.logging_config import setup_logger
from gep_planner.market.clearing import ClearingResult, GridKey
from gep_planner.planner.result import PlannerResult
from gep_planner.scenarios.types import ScenarioSet

# Configure logging
log = setup_logger(__name__)

# study tables mark undefined relative changes with a dash
MISSING = "-"


def write_study_table(df: pd.DataFrame, path: Path) -> Path:
    """Study CSV with fixed float precision and dashes for undefined cells."""
    rounded = df.copy()
    for column in rounded.columns:
        if pd.api.types.is_float_dtype(rounded[column]):
            rounded[column] = rounded[column].round(6)
    return write_table(rounded, path, MISSING)


def write_plan_jsonl(result: PlannerResult, path: Path, years: int) -> Path:
    """JSON-lines plan file: one summary line, then one line per build."""
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps({"type": "summary", **result.summary(years)}, sort_keys=True)]
    for cid, (bus, year) in sorted(result.plan.builds.items()):
        lines.append(
            json.dumps(
                {"type": "build", "candidate": cid, "bus": bus, "year": year},
                sort_keys=True,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    log.debug(f"Wrote plan to {path}")
    return path


def clearing_frame(
    results: Mapping[GridKey, ClearingResult], scenarios: ScenarioSet
) -> pd.DataFrame:
    """One row per (scenario, block, year, bus) with price, load and shed."""
    rows = []
    for (s, block, year), result in sorted(results.items()):
        for bus in sorted(result.lmp):
            rows.append(
                {
                    "scenario": scenarios[s].label,
                    "block": block,
                    "year": year,
                    "bus": bus,
                    "lmp ($/MWh)": result.lmp[bus],
                    "load (MW)": result.load[bus],
                    "shed (MW)": result.shed[bus],
                }
            )
    return pd.DataFrame(rows)


def plan_table(result: PlannerResult, years: int) -> str:
    """Human-readable summary printed on stdout."""
    rows = [
        ("mode", result.mode),
        ("plan", result.plan.label(years)),
        ("profit ($M)", f"{result.objective_musd:.6f}"),
        ("bound ($M)", f"{result.bound / 1e6:.6f}"),
        ("gap", f"{result.gap:.2e}"),
        ("nodes", str(result.nodes)),
        ("plans evaluated", str(result.plans_evaluated)),
        ("elapsed (s)", f"{result.elapsed:.1f}"),
    ]
    if result.timed_out:
        rows.append(("timed out", "yes"))
    if result.agreement is not None:
        rows.append(("modes agree", "yes" if result.agreement["agree"] else "no"))
    for cid, (bus, year) in sorted(result.plan.builds.items()):
        rows.append((f"  {cid}", f"n{bus} from year {year}"))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)
