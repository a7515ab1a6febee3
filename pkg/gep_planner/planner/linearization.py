"""
Exact linearization of binary × continuous products.

For a 0/1 expression χ and a continuous p with bounds [p_min, p_max] the product
z = χ·p is replaced by two columns z, r and the rows

    z − p + r = 0
    χ·p_min ≤ z ≤ χ·p_max
    (1 − χ)·p_min ≤ r ≤ (1 − χ)·p_max

Rows whose χ term vanishes (a zero bound) are written as column bounds instead.
Bounds that come from the big-M policy rather than from physics are registered so
that a solution resting on one can be detected afterwards.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from gep_planner.common.exceptions import ModelingError
from gep_planner.common.logging_config import setup_logger
from gep_planner.lp.problem import LinExpr, LpBuilder, Relation

# Configure logging
log = setup_logger(__name__)

BOUND_TOL = 1e-6


@dataclass(frozen=True)
class ProductBlock:
    """Columns and bounds of one linearized product."""

    name: str
    chi: LinExpr
    factor: int
    p_min: float
    p_max: float
    z: int
    r: int


@dataclass(frozen=True)
class ArtificialBound:
    """A column bound set by the big-M policy.

    The bound only matters where it can change the GENCO's profit: for a price
    column at a bus where a GENCO asset produces (`bus`), or for the dual of a
    candidate's capacity row when the candidate is built (`chi` evaluates to 1).
    """

    label: str
    col: int
    lo: float
    hi: float
    lo_artificial: bool
    hi_artificial: bool
    bus: Optional[int] = None
    chi: Optional[LinExpr] = None


@dataclass(frozen=True)
class BigMHit:
    label: str
    value: float
    bound: float


@dataclass
class BigMRegistry:
    """Product blocks and policy bounds of one model."""

    products: list[ProductBlock] = field(default_factory=list)
    bounds: list[ArtificialBound] = field(default_factory=list)

    def add_bound(self, entry: ArtificialBound) -> None:
        self.bounds.append(entry)

    def check(
        self,
        x: np.ndarray,
        dispatch_buses: Iterable[int],
        integrality_tol: float = 1e-6,
    ) -> list[BigMHit]:
        """Policy bounds that are active and relevant at `x`."""
        buses = set(dispatch_buses)
        hits = []
        for entry in self.bounds:
            if entry.bus is not None and entry.bus not in buses:
                continue
            if entry.chi is not None and entry.chi.value(x) < 1.0 - integrality_tol:
                continue
            value = float(x[entry.col])
            sides = ((entry.lo_artificial, entry.lo), (entry.hi_artificial, entry.hi))
            for artificial, bound in sides:
                if artificial and abs(value - bound) <= BOUND_TOL * max(1.0, abs(bound)):
                    hits.append(BigMHit(entry.label, value, bound))
        return hits


def linearize_binary_continuous(
    lp: LpBuilder,
    chi: LinExpr,
    factor: int,
    p_min: float,
    p_max: float,
    name: str,
    registry: Optional[BigMRegistry] = None,
) -> LinExpr:
    """Return an expression equal to χ·x[factor] for every 0/1 value of χ.

    A constant χ needs no auxiliary columns. Otherwise z and r are added with the
    rows listed in the module docstring.

    Raises:
        ModelingError: If a bound of the continuous factor is infinite or the
            bounds are reversed.
    """
    if chi.is_constant:
        return LinExpr.var(factor, chi.const) if chi.const else LinExpr()
    if not (math.isfinite(p_min) and math.isfinite(p_max)):
        raise ModelingError(
            f"product {name} needs finite bounds, got [{p_min}, {p_max}]"
        )
    if p_min > p_max:
        raise ModelingError(f"product {name} has reversed bounds [{p_min}, {p_max}]")
    if p_min == 0.0 and p_max == 0.0:
        return LinExpr()

    z = lp.add_col(f"z_{name}", -math.inf, math.inf)
    r = lp.add_col(f"r_{name}", -math.inf, math.inf)
    lp.add_row(LinExpr({z: 1.0, factor: -1.0, r: 1.0}), Relation.EQ, 0.0, f"zdef_{name}")

    z_lo, z_hi = -math.inf, math.inf
    r_lo, r_hi = -math.inf, math.inf
    if p_min == 0.0:
        z_lo = r_lo = 0.0
    else:
        lp.add_row(LinExpr.var(z) - chi * p_min, Relation.GE, 0.0, f"zlo_{name}")
        lp.add_row(LinExpr.var(r) + chi * p_min, Relation.GE, p_min, f"rlo_{name}")
    if p_max == 0.0:
        z_hi = r_hi = 0.0
    else:
        lp.add_row(LinExpr.var(z) - chi * p_max, Relation.LE, 0.0, f"zhi_{name}")
        lp.add_row(LinExpr.var(r) + chi * p_max, Relation.LE, p_max, f"rhi_{name}")
    lp.set_bounds(z, z_lo, z_hi)
    lp.set_bounds(r, r_lo, r_hi)

    if registry is not None:
        registry.products.append(ProductBlock(name, chi, factor, p_min, p_max, z, r))
    return LinExpr.var(z)
