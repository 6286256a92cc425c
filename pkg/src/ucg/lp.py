"""Exact rational linear programming.

A dense two-phase tableau simplex over :class:`~fractions.Fraction` with
Bland's pivot rule, plus a sequential-LP driver for lexicographic minimax
problems (the nucleolus family). Problem sizes are tiny (a few dozen rows),
so clarity wins over sparse data structures.

Variables are free unless listed in ``LinearProgram.nonneg``.

Infeasibility certificates use the "<= form" convention: every ``>=`` row is
read as ``-a.x <= -b``; the certificate ``y`` has ``y_i >= 0`` on inequality
rows (sign-free on equalities) and the combination ``sum_i y_i (a_i, b_i)``
has a zero coefficient on each free variable, a nonnegative coefficient on
each nonnegative variable and a strictly negative right-hand side.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import InputError, UnboundedError
from .rational import RationalLike, to_rational

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = (LE, EQ, GE)

ZERO = Fraction(0)
ONE = Fraction(1)


class Sense(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"
    FEASIBILITY = "feasibility"


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    bound: Fraction

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * v for a, v in zip(self.coeffs, x)), ZERO)

    def satisfied(self, x: Sequence[Fraction]) -> bool:
        lhs = self.value(x)
        if self.relation == LE:
            return lhs <= self.bound
        if self.relation == GE:
            return lhs >= self.bound
        return lhs == self.bound


def constraint(coeffs: Iterable[RationalLike], relation: str, bound: RationalLike) -> Constraint:
    if relation not in _RELATIONS:
        raise InputError(f"unknown relation {relation!r}")
    return Constraint(tuple(to_rational(c) for c in coeffs), relation, to_rational(bound))


@dataclass(frozen=True)
class LinearProgram:
    num_vars: int
    constraints: tuple[Constraint, ...]
    objective: tuple[Fraction, ...] = ()
    sense: Sense = Sense.FEASIBILITY
    nonneg: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.num_vars < 0:
            raise InputError("num_vars must be nonnegative")
        for k, c in enumerate(self.constraints):
            if len(c.coeffs) != self.num_vars:
                raise InputError(
                    f"constraint {k} has {len(c.coeffs)} coefficients, expected {self.num_vars}"
                )
            if c.relation not in _RELATIONS:
                raise InputError(f"constraint {k}: unknown relation {c.relation!r}")
        sense = Sense(self.sense)
        object.__setattr__(self, "sense", sense)
        if sense is Sense.FEASIBILITY:
            if any(self.objective):
                raise InputError("feasibility programs carry a zero objective")
            object.__setattr__(self, "objective", (ZERO,) * self.num_vars)
        elif len(self.objective) != self.num_vars:
            raise InputError(
                f"objective has {len(self.objective)} coefficients, expected {self.num_vars}"
            )
        if any(j < 0 or j >= self.num_vars for j in self.nonneg):
            raise InputError("nonneg index out of range")
        object.__setattr__(self, "nonneg", frozenset(self.nonneg))

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars:
            return False
        if any(x[j] < 0 for j in self.nonneg):
            return False
        return all(c.satisfied(x) for c in self.constraints)

    def objective_value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x)), ZERO)


def make_lp(
    num_vars: int,
    constraints: Iterable[Constraint],
    objective: Optional[Iterable[RationalLike]] = None,
    sense: str = "feasibility",
    nonneg: Iterable[int] = (),
) -> LinearProgram:
    obj = tuple(to_rational(c) for c in objective) if objective is not None else ()
    return LinearProgram(num_vars, tuple(constraints), obj, Sense(sense), frozenset(nonneg))


@dataclass(frozen=True)
class LpOutcome:
    status: Status
    witness: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None
    certificate: Optional[tuple[Fraction, ...]] = None
    ray: Optional[tuple[Fraction, ...]] = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def verify_farkas(lp: LinearProgram, cert: Sequence[Fraction]) -> bool:
    """Check an infeasibility certificate by direct multiplication."""
    if len(cert) != len(lp.constraints):
        return False
    combo = [ZERO] * lp.num_vars
    rhs = ZERO
    for y, c in zip(cert, lp.constraints):
        if c.relation != EQ and y < 0:
            return False
        sign = -1 if c.relation == GE else 1
        for j, a in enumerate(c.coeffs):
            combo[j] += sign * y * a
        rhs += sign * y * c.bound
    for j, a in enumerate(combo):
        if j in lp.nonneg:
            if a < 0:
                return False
        elif a != 0:
            return False
    return rhs < 0


class _Tableau:
    """Dense simplex tableau ``T x = rhs`` with an explicit basis list."""

    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        p = row[c]
        if p != 1:
            inv = 1 / p
            row[:] = [a * inv for a in row]
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[c]
            if f:
                other[:] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c

    def reduced_costs(self, cost: Sequence[Fraction]) -> tuple[list[Fraction], Fraction]:
        red = list(cost)
        value = ZERO
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                red = [rc - cb * a for rc, a in zip(red, row)]
                value += cb * self.rhs[i]
        return red, value

    def run(self, cost: Sequence[Fraction], allowed: int) -> tuple[str, Optional[int]]:
        """Minimize ``cost`` over columns ``< allowed``; Bland's rule throughout.

        Returns ("optimal", None) or ("unbounded", entering column).
        """
        red, _ = self.reduced_costs(cost)
        while True:
            enter = next((j for j in range(allowed) if red[j] < 0), None)
            if enter is None:
                return "optimal", None
            leave = None
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[i] < self.basis[leave])
                    ):
                        best, leave = ratio, i
            if leave is None:
                return "unbounded", enter
            self.pivot(leave, enter)
            f = red[enter]
            row = self.rows[leave]
            red = [rc - f * a for rc, a in zip(red, row)]


def solve(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly.

    Deterministic: the pivot sequence depends only on the program.
    """
    n = lp.num_vars
    # Column layout: one column per nonneg var, two (+/-) per free var,
    # then one slack per inequality row, then artificials.
    var_cols: list[tuple[int, int]] = []  # (var, sign)
    for j in range(n):
        var_cols.append((j, 1))
        if j not in lp.nonneg:
            var_cols.append((j, -1))
    nv = len(var_cols)
    m = len(lp.constraints)
    slack_of: dict[int, int] = {}
    for i, c in enumerate(lp.constraints):
        if c.relation != EQ:
            slack_of[i] = nv + len(slack_of)
    ns = nv + len(slack_of)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    flips: list[int] = []
    for i, c in enumerate(lp.constraints):
        row = [ZERO] * ns
        for k, (j, s) in enumerate(var_cols):
            row[k] = s * c.coeffs[j]
        if i in slack_of:
            row[slack_of[i]] = ONE if c.relation == LE else -ONE
        b = c.bound
        flip = -1 if b < 0 else 1
        if flip < 0:
            row = [-a for a in row]
            b = -b
        rows.append(row)
        rhs.append(b)
        flips.append(flip)

    # Initial identity basis: a slack with coefficient +1 where available,
    # otherwise an artificial column.
    basis: list[int] = []
    init_col: list[int] = []
    art_cols: list[int] = []
    for i in range(m):
        s = slack_of.get(i)
        if s is not None and rows[i][s] == 1:
            basis.append(s)
            init_col.append(s)
        else:
            col = ns + len(art_cols)
            art_cols.append(col)
            basis.append(col)
            init_col.append(col)
    total = ns + len(art_cols)
    for i, row in enumerate(rows):
        row.extend([ZERO] * len(art_cols))
        if basis[i] >= ns:
            row[basis[i]] = ONE

    tab = _Tableau(rows, rhs, basis)

    if art_cols:
        cost1 = [ZERO] * ns + [ONE] * len(art_cols)
        tab.run(cost1, total)
        red, w = tab.reduced_costs(cost1)
        if w > 0:
            # Phase-1 duals y_i = c_k - r_k on the initial identity columns.
            cert = []
            for i, c in enumerate(lp.constraints):
                k = init_col[i]
                y = cost1[k] - red[k]
                u = y * flips[i]
                cert.append(u if c.relation == GE else -u)
            return LpOutcome(Status.INFEASIBLE, certificate=tuple(cert))
        # Drive zero-valued artificials out of the basis; drop redundant rows.
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= ns:
                col = next((j for j in range(ns) if tab.rows[i][j] != 0), None)
                if col is None:
                    del tab.rows[i]
                    del tab.rhs[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1
        for row in tab.rows:
            del row[ns:]

    obj = lp.objective
    if lp.sense is Sense.MAXIMIZE:
        obj = tuple(-c for c in obj)
    cost2 = [ZERO] * ns
    for k, (j, s) in enumerate(var_cols):
        cost2[k] = s * obj[j]

    status, enter = tab.run(cost2, ns)

    def extract(colvals: dict[int, Fraction]) -> tuple[Fraction, ...]:
        x = [ZERO] * n
        for k, (j, s) in enumerate(var_cols):
            v = colvals.get(k)
            if v:
                x[j] += s * v
        return tuple(x)

    point = extract({b: tab.rhs[i] for i, b in enumerate(tab.basis)})
    if status == "unbounded":
        direction = {enter: ONE}
        for i, b in enumerate(tab.basis):
            direction[b] = direction.get(b, ZERO) - tab.rows[i][enter]
        return LpOutcome(Status.UNBOUNDED, witness=point, ray=extract(direction))
    return LpOutcome(Status.OPTIMAL, witness=point, value=lp.objective_value(point))


# ---------------------------------------------------------------------------
# Linear span bookkeeping


class Span:
    """Incremental row-echelon basis for membership tests in a linear span."""

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: list[tuple[int, list[Fraction]]] = []  # (pivot column, row)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, vec: Sequence[Fraction]) -> list[Fraction]:
        v = list(vec)
        for p, row in self._rows:
            f = v[p]
            if f:
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def contains(self, vec: Sequence[Fraction]) -> bool:
        return not any(self._reduce(vec))

    def add(self, vec: Sequence[Fraction]) -> bool:
        v = self._reduce(vec)
        p = next((j for j, a in enumerate(v) if a), None)
        if p is None:
            return False
        inv = 1 / v[p]
        v = [a * inv for a in v]
        new_rows = []
        for q, row in self._rows:
            f = row[p]
            if f:
                row = [a - f * b for a, b in zip(row, v)]
            new_rows.append((q, row))
        new_rows.append((p, v))
        self._rows = new_rows
        return True


# ---------------------------------------------------------------------------
# Lexicographic minimax


@dataclass(frozen=True)
class AffineRow:
    """The affine functional ``coeffs . x + constant``."""

    coeffs: tuple[Fraction, ...]
    constant: Fraction = ZERO

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * v for a, v in zip(self.coeffs, x)), self.constant)


@dataclass(frozen=True)
class LexStage:
    level: Fraction
    fixed_rows: tuple[int, ...]


@dataclass(frozen=True)
class LexResult:
    point: tuple[Fraction, ...]
    trace: tuple[LexStage, ...]
    row_values: tuple[Fraction, ...] = field(default=())


def _with(lp: LinearProgram, extra: list[Constraint], num_vars: int, objective, sense) -> LinearProgram:
    pad = num_vars - lp.num_vars
    base = [Constraint(c.coeffs + (ZERO,) * pad, c.relation, c.bound) for c in lp.constraints]
    return LinearProgram(num_vars, tuple(base + extra), tuple(objective), Sense(sense), lp.nonneg)


def lex_minimax(base: LinearProgram, rows: Sequence[AffineRow]) -> LexResult:
    """Lexicographically minimize the nonincreasing rearrangement of ``rows``.

    Sequential scheme: minimize the largest active row value ``t``; a row is
    fixed at ``t`` iff minimizing it alone, with every active row capped at
    ``t``, still yields ``t``. Rows that are constant on the current face
    (their coefficients lie in the span of the equalities) are fixed at their
    value without a test. Once all rows are fixed the remaining face is
    collapsed to its lexicographically smallest point in coordinate order,
    which makes the output independent of the order of ``rows``.
    """
    n = base.num_vars
    for k, r in enumerate(rows):
        if len(r.coeffs) != n:
            raise InputError(f"row {k} has {len(r.coeffs)} coefficients, expected {n}")
    start = solve(base)
    if start.status is Status.INFEASIBLE:
        raise InputError("lex_minimax: base region is empty")

    span = Span(n)
    for c in base.constraints:
        if c.relation == EQ:
            span.add(c.coeffs)
    fixed: list[Constraint] = []
    values: dict[int, Fraction] = {}
    active = list(range(len(rows)))
    trace: list[LexStage] = []
    witness = start.witness

    def fix(k: int, level: Fraction) -> None:
        r = rows[k]
        fixed.append(Constraint(r.coeffs, EQ, level - r.constant))
        span.add(r.coeffs)
        values[k] = level

    while active:
        constant_rows = [k for k in active if span.contains(rows[k].coeffs)]
        for k in constant_rows:
            fix(k, rows[k].value(witness))
        active = [k for k in active if k not in values]
        if not active:
            break
        # minimize t subject to active rows <= t
        caps = [
            Constraint(rows[k].coeffs + (-ONE,), LE, -rows[k].constant) for k in active
        ]
        fixed_t = [Constraint(c.coeffs + (ZERO,), c.relation, c.bound) for c in fixed]
        lp_t = _with(base, fixed_t + caps, n + 1, (ZERO,) * n + (ONE,), Sense.MINIMIZE)
        out = solve(lp_t)
        if out.status is Status.UNBOUNDED:
            raise UnboundedError("lex_minimax: excess rows are unbounded below")
        if out.status is Status.INFEASIBLE:  # pragma: no cover - base was feasible
            raise InputError("lex_minimax: region became empty")
        level = out.value
        witness = out.witness[:n]
        capped = fixed + [
            Constraint(rows[k].coeffs, LE, level - rows[k].constant) for k in active
        ]
        newly = []
        for k in active:
            if rows[k].value(witness) < level:
                continue
            probe = _with(base, capped, n, rows[k].coeffs, Sense.MINIMIZE)
            res = solve(probe)
            if res.status is Status.OPTIMAL and res.value + rows[k].constant == level:
                newly.append(k)
        if not newly:  # pragma: no cover - impossible for convex regions
            raise RuntimeError("lex_minimax: no row could be fixed")
        for k in newly:
            fix(k, level)
        trace.append(LexStage(level, tuple(newly)))
        active = [k for k in active if k not in values]

    # Collapse the final face to its lexicographically smallest point.
    for j in range(n):
        unit = tuple(ONE if i == j else ZERO for i in range(n))
        if span.contains(unit):
            continue
        res = solve(_with(base, fixed, n, unit, Sense.MINIMIZE))
        if res.status is Status.OPTIMAL:
            target = res.value
        else:
            target = res.witness[j]
        fixed.append(Constraint(unit, EQ, target))
        span.add(unit)
    final = solve(_with(base, fixed, n, (ZERO,) * n, Sense.FEASIBILITY))
    point = final.witness
    return LexResult(point, tuple(trace), tuple(r.value(point) for r in rows))
