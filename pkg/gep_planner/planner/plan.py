"""
Investment plans and the space they are drawn from.

A plan assigns each candidate asset either nothing or one (bus, year) build. A
build in year y makes the asset available from y to the end of the horizon, so the
cumulative indicator û at (bus, year) is one exactly when the asset was built at
that bus in that year or earlier.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

from gep_planner.common.exceptions import DataValidationError, EnumerationCapError
from gep_planner.common.logging_config import setup_logger
from gep_planner.scenarios.types import ScenarioSet
from gep_planner.system.model import ConventionalUnit, SystemModel, WindFarm

# Configure logging
log = setup_logger(__name__)

Candidate = Union[ConventionalUnit, WindFarm]
Decision = Optional[tuple[int, int]]


@dataclass(frozen=True)
class InvestmentPlan:
    """Build decision per candidate; `decisions[i]` is (bus, year) or None."""

    candidate_ids: tuple[str, ...]
    decisions: tuple[Decision, ...]

    def __post_init__(self):
        if len(self.candidate_ids) != len(self.decisions):
            raise DataValidationError("one decision per candidate is required")

    @classmethod
    def empty(cls, candidate_ids: tuple[str, ...]) -> "InvestmentPlan":
        return cls(candidate_ids, (None,) * len(candidate_ids))

    @classmethod
    def from_builds(
        cls, candidate_ids: tuple[str, ...], builds: Mapping[str, tuple[int, int]]
    ) -> "InvestmentPlan":
        unknown = sorted(set(builds) - set(candidate_ids))
        if unknown:
            raise DataValidationError(
                f"plan builds unknown candidates: {', '.join(unknown)}"
            )
        return cls(candidate_ids, tuple(builds.get(c) for c in candidate_ids))

    def decision(self, candidate_id: str) -> Decision:
        return self.decisions[self.candidate_ids.index(candidate_id)]

    def built_in(self, year: int) -> dict[str, int]:
        """Candidates available in `year`, mapped to the bus where they stand."""
        return {
            cid: d[0]
            for cid, d in zip(self.candidate_ids, self.decisions)
            if d is not None and d[1] <= year
        }

    def u_hat(self, candidate_id: str, bus: int, year: int) -> int:
        d = self.decision(candidate_id)
        return int(d is not None and d[0] == bus and d[1] <= year)

    @property
    def builds(self) -> dict[str, tuple[int, int]]:
        pairs = zip(self.candidate_ids, self.decisions)
        return {cid: d for cid, d in pairs if d is not None}

    def sort_key(self) -> tuple[tuple[int, ...], ...]:
        """Total order used to break ties: fewer and earlier-bus builds first."""
        return tuple((0,) if d is None else (1, d[0], d[1]) for d in self.decisions)

    def buses(self) -> tuple[int, ...]:
        """Sorted multiset of build buses, the B column of the study tables."""
        return tuple(sorted(d[0] for d in self.decisions if d is not None))

    def label(self, years: int = 1) -> str:
        if not self.builds:
            return "-"
        if years == 1:
            return "{" + ", ".join(f"n{b}" for b in self.buses()) + "}"
        parts = sorted(f"n{bus}/y{year}" for bus, year in self.builds.values())
        return "{" + ", ".join(parts) + "}"

    def to_dict(self) -> dict[str, Optional[dict[str, int]]]:
        return {
            cid: None if d is None else {"bus": d[0], "year": d[1]}
            for cid, d in zip(self.candidate_ids, self.decisions)
        }


def _signature(asset: Candidate) -> tuple:
    if isinstance(asset, ConventionalUnit):
        return (
            "unit",
            asset.capacity,
            asset.marginal_cost,
            asset.for_rate,
            asset.candidate_buses,
            asset.annual_invest_cost,
        )
    return (
        "wind",
        asset.n_turbines,
        asset.curve,
        asset.candidate_buses,
        asset.annual_invest_cost,
    )


def symmetric_under_swap(scenarios: ScenarioSet, a: str, b: str) -> bool:
    """True when swapping the outages of units `a` and `b` maps the set onto itself."""

    def swap(failed: frozenset[str]) -> frozenset[str]:
        return frozenset(b if u == a else a if u == b else u for u in failed)

    mass: dict[tuple, float] = {}
    keys = []
    for s in scenarios:
        wind = s.wind.label if s.wind is not None else None
        key = (s.availability.failed_units, s.availability.failed_lines, wind)
        keys.append(key)
        mass[key] = mass.get(key, 0.0) + s.probability
    for failed, lines, wind in keys:
        mirrored = (swap(failed), lines, wind)
        if abs(mass.get(mirrored, -1.0) - mass[(failed, lines, wind)]) > 1e-12:
            return False
    return True


@dataclass(frozen=True)
class CandidateSpace:
    """Candidates in model order with their (bus, year) build options."""

    candidates: tuple[Candidate, ...]
    years: int
    groups: tuple[tuple[int, ...], ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.candidates)

    def options(self, index: int) -> tuple[tuple[int, int], ...]:
        """Build options of one candidate in tie-break order (bus, then year)."""
        buses = sorted(self.candidates[index].candidate_buses)
        return tuple((bus, year) for bus in buses for year in range(1, self.years + 1))

    def n_plans(self) -> int:
        """Number of plans the oracle enumerates, after symmetry reduction."""
        total = 1
        for group in self.groups:
            k = len(group)
            n_options = 1 + len(self.options(group[0]))
            total *= math.comb(n_options + k - 1, k)
        return total

    def n_binaries(self) -> int:
        return sum(len(self.options(i)) for i in range(len(self.candidates)))

    def plans(self) -> Iterator[InvestmentPlan]:
        """Every distinct plan, one per symmetry class.

        Within a group the members take the chosen options in ascending order, so
        each class is represented by its smallest `sort_key`.
        """
        per_group = []
        for group in self.groups:
            choices: list[Decision] = [None, *self.options(group[0])]
            per_group.append(
                list(itertools.combinations_with_replacement(choices, len(group)))
            )
        for combo in itertools.product(*per_group):
            decisions: list[Decision] = [None] * len(self.candidates)
            for group, assignment in zip(self.groups, combo):
                for index, decision in zip(group, assignment):
                    decisions[index] = decision
            yield InvestmentPlan(self.ids, tuple(decisions))


def candidate_space(
    model: SystemModel, scenarios: ScenarioSet, exploit_symmetry: Optional[bool] = None
) -> CandidateSpace:
    """Collect candidates and group the interchangeable ones.

    Two candidates are interchangeable when their data differ only in the id and
    swapping their availability leaves the scenario set unchanged. Members of a
    group are consecutive in model order.
    """
    use_symmetry = (
        model.config.exploit_symmetry if exploit_symmetry is None else exploit_symmetry
    )
    candidates: tuple[Candidate, ...] = (*model.candidate_units, *model.candidate_wind)
    groups: list[list[int]] = []
    for i, asset in enumerate(candidates):
        if use_symmetry and groups:
            previous = candidates[groups[-1][-1]]
            if _signature(previous) == _signature(asset) and symmetric_under_swap(
                scenarios, previous.id, asset.id
            ):
                groups[-1].append(i)
                continue
        groups.append([i])
    space = CandidateSpace(
        candidates, model.config.years, tuple(tuple(g) for g in groups)
    )
    merged = [g for g in space.groups if len(g) > 1]
    if merged:
        listed = "; ".join(
            "{" + ", ".join(candidates[i].id for i in g) + "}" for g in merged
        )
        log.info(f"Interchangeable candidates: {listed}")
    return space


def enumerate_plans(space: CandidateSpace, max_plans: int) -> Iterator[InvestmentPlan]:
    """Plans of `space` after checking the enumeration cap.

    Raises:
        EnumerationCapError: If more than `max_plans` plans would be evaluated.
    """
    count = space.n_plans()
    if count > max_plans:
        raise EnumerationCapError(
            f"{count} candidate plans exceed max_plans={max_plans}"
        )
    log.info(f"Enumerating {count} candidate plans")
    return space.plans()
