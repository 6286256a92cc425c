"""Games with uncertain states of nature and ex-post enforcement.

``UncertainPair`` models two states with a commonly agreed family of
coalitions that may object; payoff pairs are compared through the worst
state excess. ``TUUGame`` attaches a TU game to every state and lets players
value state-contingent payoffs by a linear state-separable utility; the
Weak Sequential Core collects allocations that no coalition can credibly
renegotiate, either ex ante or after a state is revealed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Optional, Sequence, Union

from .errors import InputError
from .lp import EQ, GE, Constraint, LinearProgram, Sense, Status, solve
from .rational import RationalLike, to_rational, to_vector
from .tu import Game, coalition_sum, core_contains, marginal_vector, members, popcount, subsets

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_GRID_STEP = Fraction(1, 2)


def _vector(g: Game, x: Iterable[RationalLike], what: str) -> tuple[Fraction, ...]:
    vec = to_vector(x, what)
    if len(vec) != g.n:
        raise InputError(f"{what} has {len(vec)} entries, expected {g.n}")
    return vec


def _pre_imputation(g: Game, x: Iterable[RationalLike], what: str) -> tuple[Fraction, ...]:
    vec = _vector(g, x, what)
    if sum(vec, ZERO) != g(g.grand):
        raise InputError(f"{what} is not efficient: sums to {sum(vec, ZERO)}, worth is {g(g.grand)}")
    return vec


# ---------------------------------------------------------------------------
# two-state uncertain games


@dataclass(frozen=True)
class UncertainPair:
    w: Game
    w2: Game
    family: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.w.n

    def difference(self) -> Game:
        return self.w - self.w2


def make_uncertain_pair(w: Game, w2: Game, family: Optional[Iterable[int]] = None) -> UncertainPair:
    if w.n != w2.n:
        raise InputError("both states must have the same players")
    grand = w.grand
    fam = tuple(range(1, grand)) if family is None else tuple(sorted(set(family)))
    if not fam:
        raise InputError("the objection family is empty")
    for m in fam:
        if not 0 < m < grand:
            raise InputError("the objection family may contain neither the empty set nor N")
    return UncertainPair(w, w2, fam)


def dominates_pair(
    up: UncertainPair,
    q: Iterable[RationalLike],
    q2: Iterable[RationalLike],
    z: Iterable[RationalLike],
    z2: Iterable[RationalLike],
) -> bool:
    """Whether ``(q, q2)`` raises the worst-state surplus of every coalition
    in the family strictly above that of ``(z, z2)``."""
    q = _pre_imputation(up.w, q, "q")
    z = _pre_imputation(up.w, z, "z")
    q2 = _pre_imputation(up.w2, q2, "q'")
    z2 = _pre_imputation(up.w2, z2, "z'")
    for m in up.family:
        new = min(coalition_sum(q, m) - up.w(m), coalition_sum(q2, m) - up.w2(m))
        old = min(coalition_sum(z, m) - up.w(m), coalition_sum(z2, m) - up.w2(m))
        if not new > old:
            return False
    return True


def is_weakly_balanced(family: Iterable[int], n: int) -> bool:
    """Whether ``family`` contains a balanced collection.

    Feasibility of ``lambda >= 0`` on the family with unit coverage of every
    player; the support of any solution is balanced.
    """
    fam = sorted(set(family))
    if not fam:
        return False
    full = (1 << n) - 1
    if any(m <= 0 or m & ~full for m in fam):
        raise InputError("family member is not a coalition")
    rows = [Constraint(tuple(ONE if m >> i & 1 else ZERO for m in fam), EQ, ONE) for i in range(n)]
    lp = LinearProgram(len(fam), tuple(rows), nonneg=frozenset(range(len(fam))))
    return solve(lp).status is Status.OPTIMAL


def _differences(up: UncertainPair, z, z2) -> tuple[Game, tuple[Fraction, ...]]:
    z = _pre_imputation(up.w, z, "z")
    z2 = _pre_imputation(up.w2, z2, "z'")
    return up.difference(), tuple(a - b for a, b in zip(z, z2))


def is_undominated(up: UncertainPair, z: Iterable[RationalLike], z2: Iterable[RationalLike]) -> bool:
    v, x = _differences(up, z, z2)
    above = [m for m in up.family if coalition_sum(x, m) >= v(m)]
    below = [m for m in up.family if coalition_sum(x, m) <= v(m)]
    return is_weakly_balanced(above, up.n) or is_weakly_balanced(below, up.n)


def is_stable(up: UncertainPair, z: Iterable[RationalLike], z2: Iterable[RationalLike]) -> bool:
    """Core or anti-core membership of ``z - z2`` in ``w - w2`` over the family."""
    v, x = _differences(up, z, z2)
    in_core = all(coalition_sum(x, m) >= v(m) for m in up.family)
    in_anti = all(coalition_sum(x, m) <= v(m) for m in up.family)
    return in_core or in_anti


# ---------------------------------------------------------------------------
# TU games with uncertainty


@dataclass(frozen=True)
class TUUGame:
    states: tuple[str, ...]
    games: tuple[Game, ...]
    slopes: tuple[tuple[Fraction, ...], ...]  # [state][player], utility u_s^i(t) = slope * t

    @property
    def n(self) -> int:
        return self.games[0].n

    @property
    def grand(self) -> int:
        return self.games[0].grand

    def utility(self, i: int, column: Sequence[Fraction]) -> Fraction:
        return sum((self.slopes[s][i] * column[s] for s in range(len(self.states))), ZERO)

    def state_index(self, state: Union[str, int]) -> int:
        if isinstance(state, str):
            if state not in self.states:
                raise InputError(f"unknown state {state!r}")
            return self.states.index(state)
        if not 0 <= state < len(self.states):
            raise InputError(f"state index {state} out of range")
        return state


def make_tuu_game(
    states: Sequence[str], games: Sequence[Game], slopes: Optional[Sequence[Sequence[RationalLike]]] = None
) -> TUUGame:
    labels = tuple(str(s) for s in states)
    if not labels:
        raise InputError("at least one state is required")
    if len(set(labels)) != len(labels):
        raise InputError("duplicate state labels")
    if len(games) != len(labels):
        raise InputError("one game per state expected")
    n = games[0].n
    if any(g.n != n for g in games):
        raise InputError("all state games must have the same players")
    if slopes is None:
        table = tuple((ONE,) * n for _ in labels)
    else:
        if len(slopes) != len(labels):
            raise InputError("one slope row per state expected")
        table = tuple(to_vector(row, f"slopes[{k}]") for k, row in enumerate(slopes))
        for row in table:
            if len(row) != n:
                raise InputError(f"slope rows need {n} entries")
            if any(v <= 0 for v in row):
                raise InputError("utility slopes must be strictly positive")
    return TUUGame(labels, tuple(games), table)


Matrix = tuple[tuple[Fraction, ...], ...]


def _allocation(tuu: TUUGame, rows: Sequence[Iterable[RationalLike]]) -> Matrix:
    if len(rows) != len(tuu.states):
        raise InputError(f"allocation needs one row per state ({len(tuu.states)})")
    out = []
    for s, (g, row) in enumerate(zip(tuu.games, rows)):
        out.append(_pre_imputation(g, row, f"allocation row {tuu.states[s]}"))
    return tuple(out)


@dataclass(frozen=True)
class WscVerdict:
    member: bool
    failing_state: Optional[int] = None
    blocking: Optional[int] = None  # coalition mask
    witness: Optional[Matrix] = None  # rows = states, columns = members of ``blocking``


def wsc_check(tuu: TUUGame, rows: Sequence[Iterable[RationalLike]]) -> WscVerdict:
    """Decide Weak Sequential Core membership through the per-state-core
    characterization, returning a certificate when it fails."""
    x = _allocation(tuu, rows)
    for s, g in enumerate(tuu.games):
        if not core_contains(g, x[s]):
            return WscVerdict(False, failing_state=s)
    for c in range(1, tuu.grand + 1):
        block = _blocking_plan(tuu, x, c)
        if block is not None:
            return WscVerdict(False, blocking=c, witness=block)
    return WscVerdict(True)


def wsc_contains(tuu: TUUGame, rows: Sequence[Iterable[RationalLike]]) -> bool:
    return wsc_check(tuu, rows).member


def _blocking_plan(tuu: TUUGame, x: Matrix, c: int) -> Optional[Matrix]:
    """Per-state restricted-core allocation of ``c`` strictly better for every
    member, by maximizing the smallest utility gain."""
    idx = members(c)
    k = len(idx)
    d = len(tuu.states)
    nv = d * k + 1  # x[s][j] at s*k + j, then epsilon
    rows = []
    for s, g in enumerate(tuu.games):
        for sub in subsets(c):
            if sub == 0:
                continue
            coeffs = [ZERO] * nv
            for j, i in enumerate(idx):
                if sub >> i & 1:
                    coeffs[s * k + j] = ONE
            rows.append(Constraint(tuple(coeffs), EQ if sub == c else GE, g(sub)))
    for j, i in enumerate(idx):
        coeffs = [ZERO] * nv
        for s in range(d):
            coeffs[s * k + j] = tuu.slopes[s][i]
        coeffs[-1] = -ONE
        rows.append(Constraint(tuple(coeffs), GE, tuu.utility(i, [x[s][i] for s in range(d)])))
    obj = (ZERO,) * (nv - 1) + (ONE,)
    out = solve(LinearProgram(nv, tuple(rows), obj, Sense.MAXIMIZE))
    if out.status is Status.INFEASIBLE:
        return None  # some restricted core is empty
    if out.status is Status.OPTIMAL and out.value <= 0:
        return None
    w = out.witness
    return tuple(tuple(w[s * k + j] for j in range(k)) for s in range(d))


def wsc_find_member(tuu: TUUGame) -> Optional[Matrix]:
    """Stack the marginal vectors of one common player order across states.

    When every state game is convex this lands in the Weak Sequential Core:
    the last member of any coalition in the order cannot get more than his
    marginal contribution in any restricted core. The result is verified
    before it is returned, so ``None`` means this construction did not work.
    """
    order = tuple(range(tuu.n))
    rows = tuple(marginal_vector(g, order) for g in tuu.games)
    return rows if wsc_contains(tuu, rows) else None


# -- recursive definition on a grid -------------------------------------------


def grid_step() -> Fraction:
    raw = os.environ.get("UCG_GRID_STEP")
    if raw is None:
        return DEFAULT_GRID_STEP
    step = to_rational(raw, "UCG_GRID_STEP")
    if step <= 0:
        raise InputError("UCG_GRID_STEP must be positive")
    return step


class _DeviationOracle:
    """Credible deviations over a finite grid of payoffs, following the
    recursive definition literally. Only the finiteness of the grid is an
    approximation."""

    def __init__(self, tuu: TUUGame, x: Matrix, step: Fraction):
        self.tuu = tuu
        self.d = len(tuu.states)
        data = [v for g in tuu.games for v in g.worth] + [v for row in x for v in row]
        lo = (min(data) - 1) // step * step
        hi = max(data) + 1
        count = int((hi - lo) / step) + 1
        self.grid = tuple(lo + k * step for k in range(count))
        self._state = lru_cache(maxsize=None)(self._state_deviation)
        self._rows = lru_cache(maxsize=None)(self._undeviated_rows)
        self._ex_ante = lru_cache(maxsize=None)(self._ex_ante_deviation)

    def _state_rows(self, c: int, s: int):
        """Grid rows for ``c`` at state ``s`` that respect its worth."""
        worth = self.tuu.games[s](c)
        k = popcount(c)
        return (row for row in product(self.grid, repeat=k) if sum(row, ZERO) <= worth)

    def _state_deviation(self, c: int, s: int, base: tuple[Fraction, ...]) -> bool:
        """Credible deviation of ``c`` at state ``s`` from its row ``base``."""
        for row in self._state_rows(c, s):
            if all(a > b for a, b in zip(row, base)) and self._credible_at_state(c, s, row):
                return True
        return False

    def _credible_at_state(self, c: int, s: int, row: tuple[Fraction, ...]) -> bool:
        if popcount(c) == 1:
            return True
        idx = members(c)
        for sub in _proper_subsets(c):
            base = tuple(row[idx.index(i)] for i in members(sub))
            if self._state(sub, s, base):
                return False
        return True

    def _undeviated_rows(self, c: int, s: int) -> tuple[tuple[Fraction, ...], ...]:
        """Rows at ``s`` from which no proper subcoalition deviates at ``s``."""
        return tuple(row for row in self._state_rows(c, s) if self._credible_at_state(c, s, row))

    def _ex_ante_deviation(self, c: int, base: Matrix) -> bool:
        """Credible deviation of ``c`` at stage 0 from ``base`` (rows = states)."""
        idx = members(c)
        target = [self.tuu.utility(i, [base[s][j] for s in range(self.d)]) for j, i in enumerate(idx)]
        choices = [self._rows(c, s) for s in range(self.d)]
        for plan in product(*choices):
            if not all(
                self.tuu.utility(i, [plan[s][j] for s in range(self.d)]) > target[j]
                for j, i in enumerate(idx)
            ):
                continue
            if popcount(c) == 1 or not self._sub_ex_ante(c, plan):
                return True
        return False

    def _sub_ex_ante(self, c: int, plan: Matrix) -> bool:
        idx = members(c)
        for sub in _proper_subsets(c):
            cols = [idx.index(i) for i in members(sub)]
            restricted = tuple(tuple(row[j] for j in cols) for row in plan)
            if self._ex_ante(sub, restricted):
                return True
        return False

    def exists(self, c: int, x: Matrix, stage: Optional[int]) -> bool:
        idx = members(c)
        restricted = tuple(tuple(row[i] for i in idx) for row in x)
        if stage is None:
            return self._ex_ante(c, restricted)
        return self._state(c, stage, restricted[stage])


def _proper_subsets(c: int) -> list[int]:
    return [s for s in subsets(c) if s and s != c]


def credible_deviation_exists(
    tuu: TUUGame,
    rows: Sequence[Iterable[RationalLike]],
    coalition: int,
    stage: Union[str, int],
    step: Optional[RationalLike] = None,
) -> bool:
    """Grid search for a credible deviation of ``coalition`` from ``rows``.

    ``stage`` is ``0`` for the ex-ante stage or a state label. The grid step
    defaults to ``UCG_GRID_STEP`` (1/2 when unset).
    """
    x = _allocation(tuu, rows)
    if not 0 < coalition <= tuu.grand:
        raise InputError(f"coalition mask {coalition!r} out of range")
    st = to_rational(step, "step") if step is not None else grid_step()
    oracle = _DeviationOracle(tuu, x, st)
    where = None if stage == 0 else tuu.state_index(stage)
    return oracle.exists(coalition, x, where)


def wsc_contains_by_definition(
    tuu: TUUGame, rows: Sequence[Iterable[RationalLike]], step: Optional[RationalLike] = None
) -> bool:
    """Brute-force Weak Sequential Core membership: no coalition has a
    credible grid deviation at any stage."""
    x = _allocation(tuu, rows)
    st = to_rational(step, "step") if step is not None else grid_step()
    oracle = _DeviationOracle(tuu, x, st)
    stages: list[Optional[int]] = [None] + list(range(len(tuu.states)))
    return not any(oracle.exists(c, x, s) for c in range(1, tuu.grand + 1) for s in stages)
