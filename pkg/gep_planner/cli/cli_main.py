"""
Command line front end.

    gep [global flags] validate
    gep [global flags] scenarios [--no-failures] [wind options]
    gep [global flags] clear [--build G=BUS[@YEAR] ...]
    gep [global flags] plan [--mode milp|oracle|both] [--gap G] [--time-limit S]
    gep [global flags] study-failures --costs 15..24
    gep [global flags] study-correlation [--turbines 100,110,120,130]

Every command writes its outputs and a manifest.json under --out. Library errors
end the process with the error class's exit code and one line on stderr.
"""

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from gep_planner.cli.manifest import RunManifest
from gep_planner.cli.outputs import (
    clearing_frame,
    plan_table,
    write_plan_jsonl,
    write_study_table,
)
from gep_planner.common.exceptions import DataValidationError, GepError, ModelingError
from gep_planner.common.filesystem import RTS24_DIR, write_table
from gep_planner.common.logging_config import set_global_level, setup_logger
from gep_planner.lp.mps import write_mps
from gep_planner.market.clearing import clear_grid
from gep_planner.market.profit import expected_discounted_profit
from gep_planner.planner.milp import build_milp
from gep_planner.planner.plan import InvestmentPlan
from gep_planner.planner.solve import MODES, plan_expansion
from gep_planner.planner.studies import run_failure_study, run_turbine_sweep
from gep_planner.planner.verification import verify_linearization
from gep_planner.scenarios.availability import base_scenario_set, enumerate_n_minus_1
from gep_planner.scenarios.combine import combine
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.scenarios.wind import (
    decorrelate,
    load_correlation_targets,
    load_marginals,
    load_wind_speeds,
    synthesize_correlated_wind,
    wind_scenarios_from_speeds,
)
from gep_planner.system.config import StudyConfig, load_config
from gep_planner.system.data_loader import load_system
from gep_planner.system.model import SystemModel

# Configure logging
log = setup_logger(__name__)


def parse_costs(text: str) -> list[float]:
    """`A..B` as the inclusive integer range, or a comma separated list."""
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
            if high < low:
                raise ValueError(f"empty range {text}")
            return [float(c) for c in range(low, high + 1)]
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid cost sweep {text!r}: {e}") from e


def parse_int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid integer list {text!r}") from e
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return values


def parse_build(text: str) -> tuple[str, tuple[int, int]]:
    """`G=BUS` or `G=BUS@YEAR`; the year defaults to 1."""
    try:
        cid, where = text.split("=", 1)
        bus, _, year = where.partition("@")
        return cid.strip(), (int(bus.strip().lower().removeprefix("n")), int(year or 1))
    except ValueError as e:
        raise argparse.ArgumentTypeError(
            f"invalid build {text!r}, expected G=BUS[@YEAR]"
        ) from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gep",
        description="Generation expansion planning for a profit-maximizing GENCO.",
    )
    parser.add_argument("--data", type=Path, default=RTS24_DIR, help="System data dir")
    parser.add_argument("--config", type=Path, help="Study configuration (TOML)")
    parser.add_argument("--candidates", type=Path, help="Extra candidate units (CSV)")
    parser.add_argument("--wind", type=Path, help="Wind farm file (CSV)")
    parser.add_argument("--seed", type=int, help="Seed of every random draw")
    parser.add_argument("--threads", type=int, help="Worker cap")
    parser.add_argument("--blocks", type=int, help="Coarsen the load curve to N blocks")
    parser.add_argument("--out", type=Path, default=Path("results"), help="Output dir")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (defaults to GEP_LOG_LEVEL or INFO)",
    )

    scenario_options = argparse.ArgumentParser(add_help=False)
    scenario_options.add_argument(
        "--no-failures", action="store_true", help="Use only the all-available scenario"
    )
    scenario_options.add_argument(
        "--wind-speeds", type=Path, help="Wind speed table, one column per site (m/s)"
    )
    scenario_options.add_argument(
        "--wind-scenarios",
        type=int,
        default=200,
        help="Number of synthetic correlated wind scenarios",
    )
    scenario_options.add_argument(
        "--correlations", type=Path, help="Correlation targets (site_a, site_b, rho)"
    )
    scenario_options.add_argument(
        "--marginals", type=Path, help="Weibull marginals (site, shape, scale)"
    )
    scenario_options.add_argument(
        "--decorrelate", action="store_true", help="Shuffle sites independently first"
    )

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", help="Load and validate the system data")
    sub.add_parser("scenarios", parents=[scenario_options], help="Write scenarios")

    clear = sub.add_parser("clear", parents=[scenario_options], help="Clear markets")
    clear.add_argument(
        "--build",
        type=parse_build,
        action="append",
        default=[],
        help="Fix a candidate build, G=BUS[@YEAR]; repeatable",
    )

    plan = sub.add_parser("plan", parents=[scenario_options], help="Find the best plan")
    plan.add_argument("--mode", choices=MODES, default="oracle")
    plan.add_argument("--gap", type=float, help="Relative MILP gap")
    plan.add_argument("--time-limit", type=float, help="Branch-and-bound time limit (s)")
    plan.add_argument("--dump-lp", action="store_true", help="Write the MILP as MPS")
    plan.add_argument(
        "--verify", action="store_true", help="Cross-check the linearized profit"
    )

    failures = sub.add_parser(
        "study-failures", parents=[scenario_options], help="Impact of failures"
    )
    failures.add_argument("--costs", type=parse_costs, required=True, help="e.g. 15..24")
    failures.add_argument("--mode", choices=("oracle", "milp"), default="oracle")

    correlation = sub.add_parser(
        "study-correlation", parents=[scenario_options], help="Impact of correlation"
    )
    correlation.add_argument(
        "--turbines", type=parse_int_list, help="Candidate farm sizes, e.g. 100,110,120"
    )
    correlation.add_argument("--mode", choices=("oracle", "milp"), default="oracle")
    return parser


def _load(args: argparse.Namespace) -> tuple[StudyConfig, SystemModel]:
    config = load_config(
        args.config, seed=args.seed, threads=args.threads, coarsen_blocks=args.blocks
    )
    model = load_system(args.data, config, candidates=args.candidates, wind=args.wind)
    return config, model


def _wind_dir(args: argparse.Namespace) -> Path:
    return args.wind.parent if args.wind is not None else args.data


def _wind_set(model: SystemModel, args: argparse.Namespace) -> ScenarioSet:
    """Wind scenarios from a speed table, or synthesized from correlation targets."""
    curve = model.wind_farms[0].curve
    if args.wind_speeds is not None:
        wind = wind_scenarios_from_speeds(load_wind_speeds(args.wind_speeds), curve)
    else:
        directory = _wind_dir(args)
        targets = load_correlation_targets(
            args.correlations or directory / "correlations.csv"
        )
        marginals = load_marginals(args.marginals or directory / "marginals.csv")
        wind = synthesize_correlated_wind(
            targets, marginals, args.wind_scenarios, model.config.seed, curve
        )
    if args.decorrelate:
        cfg = model.config
        wind = decorrelate(
            wind, cfg.seed, cfg.decorrelation_threshold, cfg.decorrelation_max_tries
        )
    return wind


def _scenario_set(model: SystemModel, args: argparse.Namespace) -> ScenarioSet:
    avail = base_scenario_set() if args.no_failures else enumerate_n_minus_1(model)
    if not model.wind_farms:
        return avail
    return combine(avail, _wind_set(model, args), model.config.max_scenarios)


def _inputs(args: argparse.Namespace) -> list[Path]:
    paths = [args.data]
    names = ("config", "candidates", "wind", "wind_speeds", "correlations", "marginals")
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            paths.append(value)
    if args.wind is not None:
        paths.append(args.wind.parent)
    return paths


def cmd_validate(args, model: SystemModel, manifest: RunManifest) -> None:
    print(
        f"{len(model.buses)} buses, {len(model.lines)} lines, "
        f"{len(model.existing_units)} units, "
        f"{len(model.candidate_units)} candidate units, "
        f"{len(model.existing_wind)} wind farms, {len(model.candidate_wind)} candidate "
        f"farms, {len(model.load_blocks)} load blocks ({model.total_hours:g} h), "
        f"{model.config.years} year(s)"
    )


def cmd_scenarios(args, model: SystemModel, manifest: RunManifest) -> None:
    with manifest.phase("scenarios"):
        scenarios = _scenario_set(model, args)
    manifest.add_output(write_table(scenarios.to_frame(), args.out / "scenarios.csv"))
    print(f"{len(scenarios)} scenarios written to {args.out / 'scenarios.csv'}")


def cmd_clear(args, model: SystemModel, manifest: RunManifest) -> None:
    ids = tuple(c.id for c in (*model.candidate_units, *model.candidate_wind))
    plan = InvestmentPlan.from_builds(ids, dict(args.build))
    with manifest.phase("scenarios"):
        scenarios = _scenario_set(model, args)
    with manifest.phase("clearing"):
        results = clear_grid(model, scenarios, plan)
    frame = clearing_frame(results, scenarios)
    manifest.add_output(write_table(frame, args.out / "clearing.csv"))
    profit = expected_discounted_profit(results, plan, model, scenarios)
    shed = max(r.total_shed for r in results.values())
    print(
        f"{len(results)} cells cleared; largest shed {shed:.3f} MW; expected "
        f"discounted GENCO profit {profit / 1e6:.6f} $M under "
        f"{plan.label(model.config.years)}"
    )


def cmd_plan(args, model: SystemModel, manifest: RunManifest) -> None:
    with manifest.phase("scenarios"):
        scenarios = _scenario_set(model, args)
    if args.dump_lp:
        with manifest.phase("dump-lp"):
            milp = build_milp(model, scenarios)
            manifest.add_output(write_mps(milp.lp, args.out / "milp.mps"))
    with manifest.phase("plan"):
        result = plan_expansion(model, scenarios, args.mode, args.gap, args.time_limit)
    years = model.config.years
    manifest.add_output(write_plan_jsonl(result, args.out / "plan.jsonl", years))
    manifest.add_output(write_table(result.trace, args.out / "trace.csv"))
    if args.verify:
        with manifest.phase("verify"):
            report = verify_linearization(model, scenarios, result)
        manifest.add_output(write_table(report.frame, args.out / "verification.csv"))
        if not report.passed:
            raise ModelingError(
                f"linearization check failed (max relative error {report.max_error:.2e})"
            )
    print(plan_table(result, years))


def cmd_study_failures(args, model: SystemModel, manifest: RunManifest) -> None:
    wind = _wind_set(model, args) if model.wind_farms else None
    with manifest.phase("study"):
        table = run_failure_study(model, args.costs, wind, args.mode)
    manifest.add_output(write_study_table(table, args.out / "failure_study.csv"))
    print(table.to_string(index=False, na_rep="-"))


def cmd_study_correlation(args, model: SystemModel, manifest: RunManifest) -> None:
    if not model.candidate_wind:
        raise DataValidationError(
            "the correlation study needs candidate wind farms (--wind)"
        )
    avail = base_scenario_set() if args.no_failures else enumerate_n_minus_1(model)
    with manifest.phase("scenarios"):
        correlated = _wind_set(model, args)
    turbines = args.turbines or [model.candidate_wind[0].n_turbines]
    with manifest.phase("study"):
        table = run_turbine_sweep(
            model, avail, correlated, turbines, model.config.seed, args.mode
        )
    manifest.add_output(write_study_table(table, args.out / "correlation_study.csv"))
    print(table.to_string(index=False, na_rep="-"))


HANDLERS = {
    "validate": cmd_validate,
    "scenarios": cmd_scenarios,
    "clear": cmd_clear,
    "plan": cmd_plan,
    "study-failures": cmd_study_failures,
    "study-correlation": cmd_study_correlation,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code.

    argparse usage errors exit with code 2 before anything is loaded.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_global_level(args.log_level)
    try:
        config, model = _load(args)
        manifest = RunManifest.start(args.command, argv, config)
        manifest.add_inputs(_inputs(args))
        HANDLERS[args.command](args, model, manifest)
        manifest.write(args.out)
    except GepError as e:
        print(f"error: {type(e).__name__}: {e.message}", file=sys.stderr)
        log.debug("Failure details", exc_info=True)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
