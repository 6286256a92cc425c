"""Games whose coalition worths are random variables.

Two models live here. In the chance-constrained model a coalition structure
promises each block a budget equal to a fractile of its random worth, and
payoffs are judged by the probability that a coalition's realized worth
beats what it was promised. In the quantile-preference model every player
ranks random payoffs by a personal quantile, and allocations split the
expected value plus a sharing vector for the residual risk.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional, Sequence

from .errors import InputError
from .lp import EQ, GE, AffineRow, Constraint, LexStage, LinearProgram, Sense, Status, lex_minimax, solve
from .rational import RationalLike, to_rational, to_vector
from .tu import (
    MAX_PLAYERS,
    Game,
    coalition_sum,
    game_from_function,
    is_balanced,
    label,
    lex_compare,
    members,
)
from .uncertainty import DiscreteDistribution, quantile

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# chance-constrained games


@dataclass(frozen=True)
class ChanceGame:
    n: int
    dist: tuple[Optional[DiscreteDistribution], ...]  # indexed by mask; slot 0 unused

    @property
    def grand(self) -> int:
        return (1 << self.n) - 1

    def __call__(self, mask: int) -> DiscreteDistribution:
        return self.dist[mask]


def make_chance_game(n: int, table: Mapping[int, DiscreteDistribution]) -> ChanceGame:
    if not 1 <= n <= MAX_PLAYERS:
        raise InputError(f"player count must be in 1..{MAX_PLAYERS}, got {n}")
    full = (1 << n) - 1
    slots: list[Optional[DiscreteDistribution]] = [None] * (full + 1)
    for mask, dist in table.items():
        if not isinstance(mask, int) or not 0 < mask <= full:
            raise InputError(f"coalition mask {mask!r} out of range")
        if any(v < 0 for v in dist.values):
            raise InputError(f"coalition {label(mask)}: worths must be nonnegative")
        slots[mask] = dist
    missing = [label(m) for m in range(1, full + 1) if slots[m] is None]
    if missing:
        raise InputError(f"missing distribution for coalition(s) {', '.join(missing)}")
    return ChanceGame(n, tuple(slots))


@dataclass(frozen=True)
class CoalitionStructure:
    blocks: tuple[int, ...]
    fractiles: tuple[Fraction, ...]


def make_structure(n: int, blocks: Sequence[int], fractiles: Sequence[RationalLike]) -> CoalitionStructure:
    if len(blocks) != len(fractiles):
        raise InputError("one fractile per block expected")
    seen = 0
    for b in blocks:
        if b <= 0 or b >> n:
            raise InputError(f"block {b!r} is not a coalition of {n} players")
        if seen & b:
            raise InputError("blocks overlap")
        seen |= b
    if seen != (1 << n) - 1:
        raise InputError("blocks do not cover every player")
    alphas = to_vector(fractiles, "fractile")
    for a in alphas:
        if not 0 < a < 1:
            raise InputError(f"fractile must lie strictly between 0 and 1, got {a}")
    return CoalitionStructure(tuple(blocks), alphas)


def grand_structure(n: int, alpha: RationalLike) -> CoalitionStructure:
    return make_structure(n, [(1 << n) - 1], [alpha])


def budgets(cg: ChanceGame, cs: CoalitionStructure) -> tuple[Fraction, ...]:
    """Left-quantile budget of each block."""
    _check_structure(cg, cs)
    return tuple(quantile(cg(b), a, "left") for b, a in zip(cs.blocks, cs.fractiles))


def _check_structure(cg: ChanceGame, cs: CoalitionStructure) -> None:
    union = 0
    for b in cs.blocks:
        union |= b
    if union != cg.grand:
        raise InputError("coalition structure does not match the game")


def _payoff(cg: ChanceGame, x: Sequence[RationalLike]) -> tuple[Fraction, ...]:
    vec = to_vector(x, "payoff")
    if len(vec) != cg.n:
        raise InputError(f"payoff has {len(vec)} entries, expected {cg.n}")
    return vec


def prior_budget_check(cg: ChanceGame, x: Sequence[RationalLike], cs: CoalitionStructure) -> bool:
    vec = _payoff(cg, x)
    if any(v < 0 for v in vec):
        raise InputError("prior payoffs must be nonnegative")
    return all(coalition_sum(vec, b) == q for b, q in zip(cs.blocks, budgets(cg, cs)))


def probabilistic_excess(cg: ChanceGame, mask: int, x: Sequence[RationalLike]) -> Fraction:
    vec = _payoff(cg, x)
    if not 0 < mask <= cg.grand:
        raise InputError(f"coalition mask {mask!r} out of range")
    return 1 - cg(mask).cdf(coalition_sum(vec, mask))


def probabilistic_excess_profile(cg: ChanceGame, x: Sequence[RationalLike]) -> tuple[Fraction, ...]:
    vec = _payoff(cg, x)
    return tuple(sorted((probabilistic_excess(cg, m, vec) for m in range(1, cg.grand + 1)), reverse=True))


def budget_lp(cg: ChanceGame, cs: CoalitionStructure) -> LinearProgram:
    rows = []
    for b, q in zip(cs.blocks, budgets(cg, cs)):
        rows.append(Constraint(_indicator(cg.n, b), EQ, q))
    return LinearProgram(cg.n, tuple(rows), nonneg=frozenset(range(cg.n)))


def _indicator(n: int, mask: int, value: Fraction = ONE) -> tuple[Fraction, ...]:
    return tuple(value if mask >> i & 1 else ZERO for i in range(n))


# -- prior nucleolus ---------------------------------------------------------


@dataclass(frozen=True)
class _Ladder:
    """Excess levels of one coalition with the threshold each one requires."""

    levels: tuple[Fraction, ...]  # ascending, last is 1
    thresholds: tuple[Optional[Fraction], ...]  # x(S) >= threshold; None for level 1

    def threshold(self, level: Fraction) -> Optional[Fraction]:
        # the largest level not above ``level`` carries the weakest threshold
        best = self.thresholds[0]
        for lv, t in zip(self.levels, self.thresholds):
            if lv > level:
                break
            best = t
        return best

    def below(self, level: Fraction) -> Optional[Fraction]:
        """Largest level strictly below ``level``, or None."""
        lower = [lv for lv in self.levels if lv < level]
        return lower[-1] if lower else None


def _ladder(dist: DiscreteDistribution) -> _Ladder:
    levels = []
    thresholds = []
    for value, cum in reversed(dist.cumulative()):
        levels.append(1 - cum)
        thresholds.append(value)
    levels.append(ONE)
    thresholds.append(None)
    return _Ladder(tuple(levels), tuple(thresholds))


@dataclass(frozen=True)
class PriorNucleolus:
    point: tuple[Fraction, ...]
    excess: tuple[Fraction, ...]  # nonincreasing probabilistic excesses
    trace: tuple[LexStage, ...]  # stage level and the coalition masks pinned at it
    unique: bool  # False when other points share the optimal excess vector


class _PriorSearch:
    def __init__(self, cg: ChanceGame, cs: CoalitionStructure):
        self.cg = cg
        self.n = cg.n
        self.base = budget_lp(cg, cs)
        self.ladders = {m: _ladder(cg(m)) for m in range(1, cg.grand + 1)}
        self._feasible: dict[frozenset, bool] = {}
        self._memo: dict = {}

    def feasible(self, caps: frozenset) -> bool:
        if caps not in self._feasible:
            rows = [Constraint(_indicator(self.n, m), GE, t) for m, t in sorted(caps)]
            lp = LinearProgram(self.n, self.base.constraints + tuple(rows), nonneg=self.base.nonneg)
            self._feasible[caps] = solve(lp).status is Status.OPTIMAL
        return self._feasible[caps]

    @staticmethod
    def _merge(caps: frozenset, extra: dict[int, Fraction]) -> frozenset:
        merged = dict(caps)
        for m, t in extra.items():
            if m not in merged or merged[m] < t:
                merged[m] = t
        return frozenset(merged.items())

    def _at(self, active: Sequence[int], level: Fraction) -> dict[int, Fraction]:
        out = {}
        for m in active:
            t = self.ladders[m].threshold(level)
            if t is not None:
                out[m] = t
        return out

    def search(self, active: tuple[int, ...], caps: frozenset):
        """All optimal continuations: list of (tail, caps, trace)."""
        if not active:
            return [((), caps, ())]
        key = (active, caps)
        if key in self._memo:
            return self._memo[key]
        levels = sorted({lv for m in active for lv in self.ladders[m].levels})
        star = next(lv for lv in levels if self.feasible(self._merge(caps, self._at(active, lv))))
        capped = self._merge(caps, self._at(active, star))

        strict: dict[int, Fraction] = {}
        for m in active:
            lower = self.ladders[m].below(star)
            if lower is None:
                continue
            t = self.ladders[m].threshold(lower)
            if self.feasible(self._merge(capped, {m: t})):
                strict[m] = t
        choices: list[tuple[int, ...]] = []
        cand = sorted(strict)
        for size in range(len(cand), 0, -1):
            for combo in combinations(cand, size):
                if self.feasible(self._merge(capped, {m: strict[m] for m in combo})):
                    choices.append(combo)
            if choices:
                break

        results = []
        if not choices:
            stage = LexStage(star, active)
            results.append(((star,) * len(active), capped, (stage,)))
        for below in choices:
            pinned = tuple(m for m in active if m not in below)
            stage = LexStage(star, pinned)
            for tail, sub_caps, sub_trace in self.search(below, capped):
                results.append(((star,) * len(pinned) + tail, sub_caps, (stage,) + sub_trace))
        best = min(results, key=lambda r: _Key(r[0]))[0]
        keep = []
        seen = set()
        for r in results:
            if r[0] == best and r[1] not in seen:
                seen.add(r[1])
                keep.append(r)
        self._memo[key] = keep
        return keep

    def representative(self, caps: frozenset) -> tuple[Fraction, ...]:
        """Balanced point of an optimal polyhedron: lexicographic minimax of
        each coalition's shortfall from the atom it is held to."""
        cap = dict(caps)
        rows = [Constraint(_indicator(self.n, m), GE, t) for m, t in sorted(caps)]
        lp = LinearProgram(self.n, self.base.constraints + tuple(rows), nonneg=self.base.nonneg)
        shortfalls = []
        for m in range(1, self.cg.grand + 1):
            target = cap.get(m, self.cg(m).values[0])
            shortfalls.append(AffineRow(_indicator(self.n, m, -ONE), target))
        return lex_minimax(lp, shortfalls).point


class _Key:
    """Lexicographic ordering wrapper for Fraction tuples."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return lex_compare(self.v, other.v) < 0


def prior_nucleolus(cg: ChanceGame, cs: CoalitionStructure) -> PriorNucleolus:
    """Lexicographic minimizer of the nonincreasing probabilistic-excess vector.

    Excesses are step functions, so each coalition has finitely many levels
    and ``e(S,x) <= l`` is the linear constraint ``x(S) >= t``. Levels are
    descended one stage at a time; at each stage every maximum-size set of
    coalitions that can drop strictly below the current level is explored.
    The optimal set is usually not a single point, so one representative is
    returned: within each optimal polyhedron the point that lexicographically
    minimizes the shortfalls ``t_S - x(S)``, and the smallest such point in
    player order across polyhedra.
    """
    _check_structure(cg, cs)
    search = _PriorSearch(cg, cs)
    if not search.feasible(frozenset()):
        raise InputError("budget region is empty: nonnegative payoffs cannot meet the block quantiles")
    active = tuple(range(1, cg.grand + 1))
    results = search.search(active, frozenset())
    candidates = []
    for tail, caps, trace in results:
        point = search.representative(caps)
        candidates.append((probabilistic_excess_profile(cg, point), point, trace))
    best_excess = min((c[0] for c in candidates), key=_Key)
    finalists = [c for c in candidates if c[0] == best_excess]
    finalists.sort(key=lambda c: _Key(c[1]))
    _, point, trace = finalists[0]
    unique = _is_isolated(search, results, point)
    return PriorNucleolus(point, best_excess, trace, unique)


def _is_isolated(search: _PriorSearch, results, point) -> bool:
    """True when every optimal polyhedron is the single given point."""
    n = search.n
    for _, caps, _ in results:
        rows = [Constraint(_indicator(n, m), GE, t) for m, t in sorted(caps)]
        for j in range(n):
            for sense in (Sense.MINIMIZE, Sense.MAXIMIZE):
                obj = _indicator(n, 1 << j)
                lp = LinearProgram(n, search.base.constraints + tuple(rows), obj, sense, search.base.nonneg)
                out = solve(lp)
                if out.value != point[j]:
                    return False
    return True


# -- posterior adjustment ----------------------------------------------------


def posterior_adjust(
    x: Sequence[RationalLike], realized: Mapping[int, RationalLike], cs: CoalitionStructure
) -> tuple[Fraction, ...]:
    """Rescale promised payoffs inside each block to its realized worth,
    keeping the ratios between members. A block promised nothing in total
    splits its realization equally."""
    vec = list(to_vector(x, "payoff"))
    n = len(vec)
    union = 0
    for b in cs.blocks:
        union |= b
    if union != (1 << n) - 1:
        raise InputError("coalition structure does not match the payoff length")
    out = list(vec)
    for b in cs.blocks:
        if b not in realized:
            raise InputError(f"no realized worth for block {label(b)}")
        total = to_rational(realized[b], f"realized{label(b)}")
        if total < 0:
            raise InputError("realized worths must be nonnegative")
        idx = members(b)
        promised = sum((vec[i] for i in idx), ZERO)
        if promised == 0:
            for i in idx:
                out[i] = total / len(idx)
        else:
            for i in idx:
                out[i] = vec[i] * total / promised
    return tuple(out)


# ---------------------------------------------------------------------------
# quantile-preference games


@dataclass(frozen=True)
class StochasticGame:
    n: int
    actions: tuple[Optional[tuple[tuple[str, DiscreteDistribution], ...]], ...]  # by mask
    alphas: tuple[Fraction, ...]

    @property
    def grand(self) -> int:
        return (1 << self.n) - 1

    def action_map(self, mask: int) -> dict[str, DiscreteDistribution]:
        return dict(self.actions[mask])


def make_stochastic_game(
    n: int,
    actions: Mapping[int, Mapping[str, DiscreteDistribution]],
    alphas: Sequence[RationalLike],
) -> StochasticGame:
    if not 1 <= n <= MAX_PLAYERS:
        raise InputError(f"player count must be in 1..{MAX_PLAYERS}, got {n}")
    alpha = to_vector(alphas, "alpha")
    if len(alpha) != n:
        raise InputError(f"expected {n} fractiles, got {len(alpha)}")
    for a in alpha:
        if not 0 < a < 1:
            raise InputError(f"fractile must lie strictly between 0 and 1, got {a}")
    full = (1 << n) - 1
    slots: list = [None] * (full + 1)
    for mask, acts in actions.items():
        if not isinstance(mask, int) or not 0 < mask <= full:
            raise InputError(f"coalition mask {mask!r} out of range")
        if not acts:
            raise InputError(f"coalition {label(mask)} has no actions")
        slots[mask] = tuple(sorted(acts.items()))
    missing = [label(m) for m in range(1, full + 1) if slots[m] is None]
    if missing:
        raise InputError(f"missing actions for coalition(s) {', '.join(missing)}")
    return StochasticGame(n, tuple(slots), alpha)


@dataclass(frozen=True)
class SBAllocation:
    d: tuple[Fraction, ...]
    r: tuple[Fraction, ...]
    action: str


def quantile_game(sg: StochasticGame) -> Game:
    """``w(S)``: best right quantile over the coalition's actions and members."""

    def worth(mask: int) -> Fraction:
        if mask == 0:
            return ZERO
        return max(
            quantile(dist, sg.alphas[i], "right") for _, dist in sg.actions[mask] for i in members(mask)
        )

    return game_from_function(sg.n, worth)


def sb_is_balanced(sg: StochasticGame) -> bool:
    return is_balanced(quantile_game(sg))


def make_sb_allocation(
    sg: StochasticGame, d: Sequence[RationalLike], r: Sequence[RationalLike], action: str
) -> SBAllocation:
    dv, rv = to_vector(d, "d"), to_vector(r, "r")
    acts = sg.action_map(sg.grand)
    if action not in acts:
        raise InputError(f"unknown action {action!r} for the grand coalition")
    if len(dv) != sg.n or len(rv) != sg.n:
        raise InputError(f"d and r need {sg.n} entries each")
    if sum(dv, ZERO) != acts[action].mean():
        raise InputError("d must distribute the expected payoff exactly")
    if any(v < 0 for v in rv) or sum(rv, ZERO) != 1:
        raise InputError("r must be a nonnegative vector summing to 1")
    return SBAllocation(dv, rv, action)


def sb_payoffs(sg: StochasticGame, alloc: SBAllocation) -> tuple[Fraction, ...]:
    """Per-player quantile value ``d_i + r_i (u_i - E)`` of the allocation."""
    alloc = make_sb_allocation(sg, alloc.d, alloc.r, alloc.action)
    dist = sg.action_map(sg.grand)[alloc.action]
    mean = dist.mean()
    return tuple(
        alloc.d[i] + alloc.r[i] * (quantile(dist, sg.alphas[i], "right") - mean) for i in range(sg.n)
    )


def sb_core_contains(sg: StochasticGame, alloc: SBAllocation) -> bool:
    values = sb_payoffs(sg, alloc)
    w = quantile_game(sg)
    return all(coalition_sum(values, m) >= w(m) for m in range(1, sg.grand + 1))


def sb_find_core_allocation(sg: StochasticGame) -> Optional[SBAllocation]:
    """Search each grand-coalition action for a core allocation by LP."""
    w = quantile_game(sg)
    n = sg.n
    for action, dist in sg.actions[sg.grand]:
        mean = dist.mean()
        gain = [quantile(dist, a, "right") - mean for a in sg.alphas]
        rows = [
            Constraint((ONE,) * n + (ZERO,) * n, EQ, mean),
            Constraint((ZERO,) * n + (ONE,) * n, EQ, ONE),
        ]
        for m in range(1, sg.grand + 1):
            coeffs = _indicator(n, m) + tuple(gain[i] if m >> i & 1 else ZERO for i in range(n))
            rows.append(Constraint(coeffs, GE, w(m)))
        lp = LinearProgram(2 * n, tuple(rows), nonneg=frozenset(range(n, 2 * n)))
        out = solve(lp)
        if out.status is Status.OPTIMAL:
            return SBAllocation(out.witness[:n], out.witness[n:], action)
    return None
