# Copyright (c) 2025 netbound developers
#
# This file is part of netbound
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
"""Exact rational linear programming.

A dense two-phase tableau simplex over `fractions.Fraction` with Bland's
smallest-index rule, so it terminates on degenerate problems and is fully
deterministic. The programs netbound solves (flows on desk-scale networks)
have at most a few hundred columns.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from netbound.exceptions import DimensionMismatch

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


class Sense(str, Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class LpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Constraint:
    coefficients: Tuple[Fraction, ...]
    relation: Relation
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(Fraction(c) for c in self.coefficients))
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def holds(self, x: Sequence[Fraction]) -> bool:
        lhs = sum((c * v for c, v in zip(self.coefficients, x)), ZERO)
        if self.relation == Relation.LE:
            return lhs <= self.rhs
        if self.relation == Relation.GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class LinProgram:
    """A linear program in natural form.

    ``lower_bounds[j]`` is the lower bound of variable j; None leaves the
    variable free. When `lower_bounds` is omitted every variable is >= 0.
    Upper bounds are ordinary constraints.
    """

    variable_count: int
    objective: Sequence[Fraction]
    sense: Sense = Sense.MAXIMIZE
    constraints: List[Constraint] = field(default_factory=list)
    lower_bounds: Optional[List[Optional[Fraction]]] = None

    def add(self, coefficients, relation, rhs) -> None:
        self.constraints.append(Constraint(tuple(coefficients), relation, rhs))

    def bounds(self) -> List[Optional[Fraction]]:
        if self.lower_bounds is None:
            return [ZERO] * self.variable_count
        return [None if b is None else Fraction(b) for b in self.lower_bounds]

    def check(self) -> None:
        n = self.variable_count
        if n < 0:
            raise DimensionMismatch(f"variable count must be non-negative, got {n}")
        if len(self.objective) != n:
            raise DimensionMismatch(f"objective has {len(self.objective)} coefficients, expected {n}")
        for i, con in enumerate(self.constraints):
            if len(con.coefficients) != n:
                raise DimensionMismatch(f"constraint {i} has {len(con.coefficients)} coefficients, expected {n}")
        if self.lower_bounds is not None and len(self.lower_bounds) != n:
            raise DimensionMismatch(f"{len(self.lower_bounds)} lower bounds given for {n} variables")

    def feasible(self, x: Sequence[Fraction]) -> bool:
        """True when `x` satisfies every constraint and bound exactly."""
        for v, lb in zip(x, self.bounds()):
            if lb is not None and v < lb:
                return False
        return all(con.holds(x) for con in self.constraints)


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    value: Optional[Fraction] = None
    assignment: Optional[Tuple[Fraction, ...]] = None

    @property
    def optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL


class _Tableau:
    """Dense tableau in equality form: rows . x = rhs, x >= 0, rhs >= 0."""

    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, r: int, col: int) -> None:
        row = self.rows[r]
        p = row[col]
        if p != ONE:
            self.rows[r] = row = [v / p for v in row]
            self.rhs[r] /= p
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[col]
            if f == 0:
                continue
            self.rows[i] = [a - f * b for a, b in zip(other, row)]
            self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = col
        self.pivots += 1

    def reduced_costs(self, cost: List[Fraction]) -> List[Fraction]:
        z = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb == 0:
                continue
            for j, a in enumerate(self.rows[i]):
                if a != 0:
                    z[j] -= cb * a
        return z

    def maximize(self, cost: List[Fraction], allowed: Sequence[bool]) -> bool:
        """Run primal simplex with Bland's rule. Returns False when unbounded."""
        while True:
            z = self.reduced_costs(cost)
            entering = next((j for j, zj in enumerate(z) if zj > 0 and allowed[j]), None)
            if entering is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a <= 0:
                    continue
                key = (self.rhs[i] / a, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
            if best is None:
                return False
            logger.debug(f"ratlp: pivot column {entering} into row {best[1]}")
            self.pivot(best[1], entering)

    def values(self, width: int) -> List[Fraction]:
        x = [ZERO] * width
        for i, b in enumerate(self.basis):
            x[b] = self.rhs[i]
        return x


def solve(lp: LinProgram) -> LpResult:
    """Solve `lp` exactly.

    Returns an `LpResult` whose assignment satisfies every constraint with
    exact rational arithmetic when the status is Optimal.

    :raises DimensionMismatch: when a coefficient list has the wrong length
    """
    header = "ratlp.solve"
    lp.check()
    n = lp.variable_count

    # column expansion: x_j = offset_j + sum(sign * column)
    columns: List[List[Tuple[int, int]]] = []
    offsets: List[Fraction] = []
    width = 0
    for lb in lp.bounds():
        if lb is None:
            columns.append([(width, 1), (width + 1, -1)])
            offsets.append(ZERO)
            width += 2
        else:
            columns.append([(width, 1)])
            offsets.append(lb)
            width += 1
    structural = width

    shaped = []
    for con in lp.constraints:
        row = [ZERO] * structural
        rhs = con.rhs
        for j, coef in enumerate(con.coefficients):
            if coef == 0:
                continue
            rhs -= coef * offsets[j]
            for col, sign in columns[j]:
                row[col] += sign * coef
        relation = con.relation
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
            relation = {Relation.LE: Relation.GE, Relation.GE: Relation.LE}.get(relation, relation)
        shaped.append((row, relation, rhs))

    n_slack = sum(1 for _, rel, _ in shaped if rel != Relation.EQ)
    n_art = sum(1 for _, rel, _ in shaped if rel != Relation.LE)
    total = structural + n_slack + n_art
    rows, rhs, basis = [], [], []
    slack_at, art_at = structural, structural + n_slack
    artificial = [False] * total
    for row, relation, b in shaped:
        full = row + [ZERO] * (n_slack + n_art)
        if relation == Relation.LE:
            full[slack_at] = ONE
            basis.append(slack_at)
            slack_at += 1
        else:
            if relation == Relation.GE:
                full[slack_at] = -ONE
                slack_at += 1
            full[art_at] = ONE
            artificial[art_at] = True
            basis.append(art_at)
            art_at += 1
        rows.append(full)
        rhs.append(b)
    tableau = _Tableau(rows, rhs, basis)

    if n_art:
        phase1 = [-ONE if artificial[j] else ZERO for j in range(total)]
        tableau.maximize(phase1, [True] * total)
        infeasibility = sum((tableau.rhs[i] for i, b in enumerate(tableau.basis) if artificial[b]), ZERO)
        if infeasibility > 0:
            logger.info(f"{header}: infeasible (phase 1 residual {infeasibility}, {tableau.pivots} pivots)")
            return LpResult(LpStatus.INFEASIBLE)
        # drive zero-valued artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(tableau.rows):
            if artificial[tableau.basis[i]]:
                col = next((j for j in range(total) if not artificial[j] and tableau.rows[i][j] != 0), None)
                if col is None:
                    del tableau.rows[i], tableau.rhs[i], tableau.basis[i]
                    continue
                tableau.pivot(i, col)
            i += 1

    sign = ONE if lp.sense == Sense.MAXIMIZE else -ONE
    cost = [ZERO] * total
    for j, coef in enumerate(lp.objective):
        for col, s in columns[j]:
            cost[col] += sign * s * Fraction(coef)
    if not tableau.maximize(cost, [not a for a in artificial]):
        logger.info(f"{header}: unbounded after {tableau.pivots} pivots")
        return LpResult(LpStatus.UNBOUNDED)

    y = tableau.values(total)
    x = tuple(offsets[j] + sum((s * y[col] for col, s in columns[j]), ZERO) for j in range(n))
    value = sum((Fraction(c) * v for c, v in zip(lp.objective, x)), ZERO)
    assert lp.feasible(x), "simplex returned an infeasible vertex"
    logger.debug(f"{header}: optimal value {value} after {tableau.pivots} pivots")
    return LpResult(LpStatus.OPTIMAL, value, x)


class ProgramBuilder:
    """Build a `LinProgram` over named variables.

    Example::

        lp = ProgramBuilder()
        x = lp.variable("x")
        lp.constrain({x: 1}, "<=", 3)
        lp.maximize({x: 1})
        result, values = lp.solve()
    """

    def __init__(self):
        self._names: List[str] = []
        self._index: Dict[str, int] = {}
        self._lower: List[Optional[Fraction]] = []
        self._constraints: List[Tuple[Dict[str, Fraction], Relation, Fraction]] = []
        self._objective: Dict[str, Fraction] = {}
        self._sense = Sense.MAXIMIZE

    def variable(self, name: str, lower=ZERO, upper=None) -> str:
        if name in self._index:
            raise DimensionMismatch(f"variable '{name}' declared twice")
        self._index[name] = len(self._names)
        self._names.append(name)
        self._lower.append(None if lower is None else Fraction(lower))
        if upper is not None:
            self.constrain({name: 1}, Relation.LE, upper)
        return name

    def constrain(self, terms: Mapping[str, object], relation, rhs) -> None:
        for name in terms:
            if name not in self._index:
                raise DimensionMismatch(f"unknown variable '{name}'")
        self._constraints.append(({k: Fraction(v) for k, v in terms.items()}, Relation(relation), Fraction(rhs)))

    def maximize(self, terms: Mapping[str, object]) -> None:
        self._objective = {k: Fraction(v) for k, v in terms.items()}
        self._sense = Sense.MAXIMIZE

    def minimize(self, terms: Mapping[str, object]) -> None:
        self._objective = {k: Fraction(v) for k, v in terms.items()}
        self._sense = Sense.MINIMIZE

    def build(self) -> LinProgram:
        n = len(self._names)

        def dense(terms):
            row = [ZERO] * n
            for name, coef in terms.items():
                row[self._index[name]] += coef
            return row

        lp = LinProgram(n, dense(self._objective), self._sense, lower_bounds=list(self._lower))
        for terms, relation, rhs in self._constraints:
            lp.add(dense(terms), relation, rhs)
        return lp

    def solve(self) -> Tuple[LpResult, Dict[str, Fraction]]:
        result = solve(self.build())
        if not result.optimal:
            return result, {}
        return result, dict(zip(self._names, result.assignment))
