"""
Linear program containers.

`LpBuilder` collects columns and rows expressed with `LinExpr`; `build()` freezes
them into a `LinearProgram` holding a sparse constraint matrix. Solutions report
duals with the sign convention dual_i = ∂(optimal objective)/∂(rhs_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Optional, Union

import numpy as np
import numpy.typing as npt
from scipy.sparse import coo_matrix, csr_matrix

from gep_planner.common.exceptions import DataValidationError

INF = math.inf
Number = Union[int, float]


class Sense(Enum):
    """Objective direction."""

    MIN = "min"
    MAX = "max"


class Relation(Enum):
    """Row relation."""

    LE = "<="
    EQ = "="
    GE = ">="


class LpStatus(Enum):
    """Outcome of a solve."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LinExpr:
    """Sparse affine expression Σ coef·x[col] + const."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: Optional[Mapping[int, float]] = None, const: float = 0.0):
        self.terms: dict[int, float] = dict(terms) if terms else {}
        self.const = float(const)

    @classmethod
    def var(cls, col: int, coef: float = 1.0) -> LinExpr:
        return cls({col: coef})

    @classmethod
    def constant(cls, value: float) -> LinExpr:
        return cls(const=value)

    @property
    def is_constant(self) -> bool:
        return not any(self.terms.values())

    def copy(self) -> LinExpr:
        return LinExpr(self.terms, self.const)

    def add_term(self, col: int, coef: float) -> LinExpr:
        """In-place accumulate coef·x[col]."""
        if coef:
            self.terms[col] = self.terms.get(col, 0.0) + coef
        return self

    def __add__(self, other: Union[LinExpr, Number]) -> LinExpr:
        out = self.copy()
        if isinstance(other, LinExpr):
            for col, coef in other.terms.items():
                out.add_term(col, coef)
            out.const += other.const
        else:
            out.const += other
        return out

    __radd__ = __add__

    def __neg__(self) -> LinExpr:
        return LinExpr({c: -v for c, v in self.terms.items()}, -self.const)

    def __sub__(self, other: Union[LinExpr, Number]) -> LinExpr:
        return self + (-other)

    def __rsub__(self, other: Number) -> LinExpr:
        return (-self) + other

    def __mul__(self, scalar: Number) -> LinExpr:
        terms = {c: v * scalar for c, v in self.terms.items()}
        return LinExpr(terms, self.const * scalar)

    __rmul__ = __mul__

    def value(self, x: npt.NDArray[np.float64]) -> float:
        return self.const + sum(coef * x[col] for col, coef in self.terms.items())

    def __repr__(self) -> str:
        body = " + ".join(f"{v:g}·x{c}" for c, v in sorted(self.terms.items()))
        return f"LinExpr({body or '0'} + {self.const:g})"


def lin_sum(exprs: Iterable[Union[LinExpr, Number]]) -> LinExpr:
    """Sum expressions without quadratic copying."""
    out = LinExpr()
    for expr in exprs:
        if isinstance(expr, LinExpr):
            for col, coef in expr.terms.items():
                out.add_term(col, coef)
            out.const += expr.const
        else:
            out.const += expr
    return out


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """min/max c·x + offset s.t. A x (rel) b, lb ≤ x ≤ ub."""

    sense: Sense
    c: npt.NDArray[np.float64]
    lb: npt.NDArray[np.float64]
    ub: npt.NDArray[np.float64]
    A: csr_matrix
    relations: tuple[Relation, ...]
    b: npt.NDArray[np.float64]
    col_names: tuple[str, ...] = ()
    row_names: tuple[str, ...] = ()
    offset: float = 0.0

    def __post_init__(self):
        m, n = self.A.shape
        if not (len(self.c) == len(self.lb) == len(self.ub) == n):
            raise DataValidationError("column arrays do not match the matrix width")
        if not (len(self.b) == len(self.relations) == m):
            raise DataValidationError("row arrays do not match the matrix height")
        if not np.all(np.isfinite(self.c)) or not np.all(np.isfinite(self.b)):
            raise DataValidationError("objective and right-hand side must be finite")
        if not np.all(np.isfinite(self.A.data)):
            raise DataValidationError("constraint coefficients must be finite")
        if np.any(self.lb > self.ub):
            bad = int(np.argmax(self.lb > self.ub))
            raise DataValidationError(
                f"column {self.col_name(bad)} has lower bound above upper bound"
            )

    @property
    def n_cols(self) -> int:
        return self.A.shape[1]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def col_name(self, j: int) -> str:
        return self.col_names[j] if self.col_names else f"x{j}"

    def row_name(self, i: int) -> str:
        return self.row_names[i] if self.row_names else f"r{i}"

    def with_bounds(self, overrides: Mapping[int, tuple[float, float]]) -> LinearProgram:
        """Copy with some column bounds replaced."""
        if not overrides:
            return self
        lb = self.lb.copy()
        ub = self.ub.copy()
        for col, (lo, hi) in overrides.items():
            lb[col] = lo
            ub[col] = hi
        return replace(self, lb=lb, ub=ub)

    def objective_value(self, x: npt.NDArray[np.float64]) -> float:
        return float(self.c @ x) + self.offset


@dataclass(frozen=True, eq=False)
class LpSolution:
    """Result of `solve_lp`. Arrays are empty unless status is optimal."""

    status: LpStatus
    x: npt.NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    duals: npt.NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    reduced_costs: npt.NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    objective: float = math.nan
    dual_objective: float = math.nan
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL

    def value(self, expr: LinExpr) -> float:
        return expr.value(self.x)


class LpBuilder:
    """Incremental construction of a LinearProgram."""

    def __init__(self, name: str = "lp"):
        self.name = name
        self._c: list[float] = []
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._col_names: list[str] = []
        self._rows: list[int] = []
        self._cols: list[int] = []
        self._vals: list[float] = []
        self._rel: list[Relation] = []
        self._rhs: list[float] = []
        self._row_names: list[str] = []
        self._offset = 0.0

    @property
    def n_cols(self) -> int:
        return len(self._c)

    @property
    def n_rows(self) -> int:
        return len(self._rhs)

    def add_col(
        self, name: str, lb: float = 0.0, ub: float = INF, obj: float = 0.0
    ) -> int:
        self._c.append(obj)
        self._lb.append(lb)
        self._ub.append(ub)
        self._col_names.append(name)
        return len(self._c) - 1

    def set_bounds(self, col: int, lb: float, ub: float) -> None:
        self._lb[col] = lb
        self._ub[col] = ub

    def bounds(self, col: int) -> tuple[float, float]:
        return self._lb[col], self._ub[col]

    def col_name(self, col: int) -> str:
        return self._col_names[col]

    def add_row(self, expr: LinExpr, rel: Relation, rhs: float, name: str) -> int:
        """Add `expr (rel) rhs`; the expression's constant moves to the right side."""
        row = len(self._rhs)
        for col, coef in expr.terms.items():
            if coef:
                self._rows.append(row)
                self._cols.append(col)
                self._vals.append(coef)
        self._rel.append(rel)
        self._rhs.append(rhs - expr.const)
        self._row_names.append(name)
        return row

    def add_objective(self, expr: LinExpr) -> None:
        for col, coef in expr.terms.items():
            self._c[col] += coef
        self._offset += expr.const

    def build(self, sense: Sense) -> LinearProgram:
        shape = (len(self._rhs), len(self._c))
        matrix = coo_matrix((self._vals, (self._rows, self._cols)), shape=shape).tocsr()
        matrix.sum_duplicates()
        return LinearProgram(
            sense=sense,
            c=np.asarray(self._c, dtype=float),
            lb=np.asarray(self._lb, dtype=float),
            ub=np.asarray(self._ub, dtype=float),
            A=matrix,
            relations=tuple(self._rel),
            b=np.asarray(self._rhs, dtype=float),
            col_names=tuple(self._col_names),
            row_names=tuple(self._row_names),
            offset=self._offset,
        )
