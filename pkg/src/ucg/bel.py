"""Coalitional games over possible worlds with belief-function priors.

Each world carries a TU game. Coalitions sign contracts before the world is
known; a contract assigns every member a payoff in every world, and agents
rank payoff profiles by their Choquet expectation under a personal belief
function. With a common probability prior the whole theory reduces to the
expected game, which is what makes most of the exact procedures here work.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import CapabilityError, InputError
from .lp import GE, LE, Constraint, LinearProgram, Sense, Status, solve
from .rational import RationalLike, to_vector
from .tu import (
    Game,
    check_permutation,
    coalition_sum,
    core_contains,
    game_from_function,
    marginal_vector,
    members,
    prenucleolus,
)
from .uncertainty import BeliefFunction, choquet, expectation

ZERO = Fraction(0)
ONE = Fraction(1)


class Tristate(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class BelGame:
    n: int
    worlds: tuple[str, ...]
    priors: tuple[BeliefFunction, ...]  # one per player
    games: tuple[Game, ...]  # one per world

    @property
    def d(self) -> int:
        return len(self.worlds)

    @property
    def grand(self) -> int:
        return (1 << self.n) - 1

    @property
    def common(self) -> bool:
        return all(p.mass == self.priors[0].mass for p in self.priors)

    @property
    def probability(self) -> bool:
        """Common prior that is additive."""
        return self.common and self.priors[0].is_probability

    def worth(self, mask: int) -> tuple[Fraction, ...]:
        """``v_w(S)`` as a payoff profile over worlds."""
        return tuple(g(mask) for g in self.games)

    def world_index(self, world: Union[str, int]) -> int:
        if isinstance(world, str):
            if world not in self.worlds:
                raise InputError(f"unknown world {world!r}")
            return self.worlds.index(world)
        if not 0 <= world < self.d:
            raise InputError(f"world index {world} out of range")
        return world


def make_bel_game(
    priors: Union[BeliefFunction, Sequence[BeliefFunction]], games: Sequence[Game]
) -> BelGame:
    """Build a game; a single prior is shared by every player."""
    if not games:
        raise InputError("at least one world is required")
    n = games[0].n
    if any(g.n != n for g in games):
        raise InputError("all world games must have the same players")
    plist = (priors,) * n if isinstance(priors, BeliefFunction) else tuple(priors)
    if len(plist) != n:
        raise InputError(f"expected {n} priors, got {len(plist)}")
    worlds = plist[0].worlds
    for p in plist:
        if p.worlds != worlds:
            raise InputError("all priors must be defined over the same worlds")
    if len(games) != len(worlds):
        raise InputError(f"expected {len(worlds)} world games, got {len(games)}")
    return BelGame(n, worlds, plist, tuple(games))


@dataclass(frozen=True)
class Contract:
    coalition: int
    rows: tuple[tuple[Fraction, ...], ...]  # rows = worlds, columns = members

    @property
    def players(self) -> tuple[int, ...]:
        return members(self.coalition)

    def column(self, player: int) -> tuple[Fraction, ...]:
        j = self.players.index(player)
        return tuple(row[j] for row in self.rows)

    def restrict(self, mask: int) -> "Contract":
        if mask & ~self.coalition:
            raise InputError("restriction must be to a subcoalition")
        cols = [self.players.index(i) for i in members(mask)]
        return Contract(mask, tuple(tuple(row[j] for j in cols) for row in self.rows))

    def __add__(self, other: "Contract") -> "Contract":
        if other.coalition != self.coalition or len(other.rows) != len(self.rows):
            raise InputError("contracts must have the same shape")
        rows = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return Contract(self.coalition, rows)

    def scale(self, factor: RationalLike) -> "Contract":
        f = to_vector([factor])[0]
        return Contract(self.coalition, tuple(tuple(f * a for a in r) for r in self.rows))


def make_contract(bg: BelGame, coalition: int, rows: Sequence[Iterable[RationalLike]]) -> Contract:
    if not 0 < coalition <= bg.grand:
        raise InputError(f"coalition mask {coalition!r} out of range")
    if len(rows) != bg.d:
        raise InputError(f"contract needs one row per world ({bg.d}), got {len(rows)}")
    k = len(members(coalition))
    out = []
    for w, row in enumerate(rows):
        vec = to_vector(row, f"contract row {bg.worlds[w]}")
        if len(vec) != k:
            raise InputError(f"contract row {bg.worlds[w]} needs {k} entries, got {len(vec)}")
        out.append(vec)
    return Contract(coalition, tuple(out))


def grand_contract(bg: BelGame, rows: Sequence[Iterable[RationalLike]]) -> Contract:
    return make_contract(bg, bg.grand, rows)


def _shape(bg: BelGame, c: Contract) -> None:
    if len(c.rows) != bg.d or any(len(r) != len(c.players) for r in c.rows):
        raise InputError("contract shape does not match the game")
    if not 0 < c.coalition <= bg.grand:
        raise InputError("contract coalition out of range")


@dataclass(frozen=True)
class ContractStatus:
    feasible: bool
    efficient: bool


def contract_check(bg: BelGame, c: Contract) -> ContractStatus:
    """Feasibility in every world; efficiency only applies to grand contracts."""
    _shape(bg, c)
    totals = [sum(row, ZERO) for row in c.rows]
    worth = bg.worth(c.coalition)
    feasible = all(t <= v for t, v in zip(totals, worth))
    efficient = c.coalition == bg.grand and all(t == v for t, v in zip(totals, worth))
    return ContractStatus(feasible, efficient)


def _require_feasible(bg: BelGame, c: Contract, what: str) -> None:
    if not contract_check(bg, c).feasible:
        raise InputError(f"{what} is not feasible")


def value(bg: BelGame, player: int, profile: Sequence[Fraction]) -> Fraction:
    """Choquet expectation of a payoff profile under ``player``'s prior."""
    return choquet(bg.priors[player], profile)


def prefers(
    bg: BelGame, player: int, a: Sequence[RationalLike], b: Sequence[RationalLike], strict: bool = False
) -> bool:
    if not 0 <= player < bg.n:
        raise InputError(f"player index {player} out of range")
    va, vb = value(bg, player, to_vector(a)), value(bg, player, to_vector(b))
    return va > vb if strict else va >= vb


def blocks(bg: BelGame, c_s: Contract, c_n: Contract) -> bool:
    """Whether the feasible contract ``c_s`` makes every member strictly better
    off than the grand contract does."""
    _require_feasible(bg, c_s, "blocking contract")
    _shape(bg, c_n)
    return all(
        value(bg, i, c_s.column(i)) > value(bg, i, c_n.column(i)) for i in c_s.players
    )


# ---------------------------------------------------------------------------
# ex-ante core


@dataclass(frozen=True)
class CoalitionConditions:
    coalition: int
    necessary: bool  # some member's belief worth is covered by the plausibility of the share
    sufficient: Optional[bool]  # common-prior sufficient condition; None for heterogeneous priors


def ex_ante_core_conditions(bg: BelGame, c_n: Contract) -> list[CoalitionConditions]:
    """Evaluate the necessary and (for common priors) sufficient coalition
    inequalities on a feasible grand contract."""
    _require_feasible(bg, c_n, "grand contract")
    out = []
    common = bg.common
    for s in range(1, bg.grand + 1):
        worth = bg.worth(s)
        share = [sum((c_n.rows[w][i] for i in members(s)), ZERO) for w in range(bg.d)]
        necessary = any(
            choquet(bg.priors[j], worth) <= choquet(bg.priors[j].plausibility(), share)
            for j in members(s)
        )
        sufficient = None
        if common:
            nu = bg.priors[0]
            sufficient = choquet(nu, worth) <= sum(
                (choquet(nu, c_n.column(j)) for j in members(s)), ZERO
            )
        out.append(CoalitionConditions(s, necessary, sufficient))
    return out


def ex_ante_core_contains(bg: BelGame, c_n: Contract, exact: bool = False) -> Tristate:
    """Ex-ante core membership of a feasible grand contract.

    A common probability prior is decided exactly through the expected game.
    For belief priors the answer is ``NO`` when the necessary condition fails
    for some coalition, ``YES`` when the common-prior sufficient condition
    holds for all of them, and ``UNDETERMINED`` in between. ``exact=True``
    settles the gap with one blocking LP per coalition.
    """
    _require_feasible(bg, c_n, "grand contract")
    if bg.probability:
        pi = bg.priors[0].probabilities()
        ok = all(
            expectation(pi, bg.worth(s))
            <= sum((expectation(pi, c_n.column(j)) for j in members(s)), ZERO)
            for s in range(1, bg.grand + 1)
        )
        return Tristate.YES if ok else Tristate.NO
    conds = ex_ante_core_conditions(bg, c_n)
    if not all(c.necessary for c in conds):
        return Tristate.NO
    if bg.common and all(c.sufficient for c in conds):
        return Tristate.YES
    if exact:
        return Tristate.NO if find_blocking(bg, c_n) is not None else Tristate.YES
    return Tristate.UNDETERMINED


def _blocking_lp(bg: BelGame, s: int, targets: Sequence[Fraction]) -> LinearProgram:
    """Maximize the smallest Choquet gain of ``s`` over feasible contracts.

    With ``C(X) = sum_A m(A) min_A X`` each member's Choquet value is concave,
    so the epigraph is linear: ``z_A <= X(w)`` for ``w`` in ``A``.
    Variables: contract entries, one ``z`` per member and focal element, then ``eps``.
    """
    idx = members(s)
    k = len(idx)
    focal = [bg.priors[i].focal_elements() for i in idx]
    offsets = []
    pos = bg.d * k
    for f in focal:
        offsets.append(pos)
        pos += len(f)
    nv = pos + 1
    rows = []
    for w in range(bg.d):
        coeffs = [ZERO] * nv
        for j in range(k):
            coeffs[w * k + j] = ONE
        rows.append(Constraint(tuple(coeffs), LE, bg.games[w](s)))
    for j, i in enumerate(idx):
        mass = bg.priors[i].mass
        total = [ZERO] * nv
        for a_pos, a in enumerate(focal[j]):
            zv = offsets[j] + a_pos
            total[zv] = mass[a]
            for w in range(bg.d):
                if a >> w & 1:
                    coeffs = [ZERO] * nv
                    coeffs[zv] = ONE
                    coeffs[w * k + j] = -ONE
                    rows.append(Constraint(tuple(coeffs), LE, ZERO))
        total[-1] = -ONE
        rows.append(Constraint(tuple(total), GE, targets[j]))
    obj = (ZERO,) * (nv - 1) + (ONE,)
    return LinearProgram(nv, tuple(rows), obj, Sense.MAXIMIZE)


def find_blocking(bg: BelGame, c_n: Contract) -> Optional[Contract]:
    """A feasible contract of some coalition that blocks ``c_n``, or None."""
    _require_feasible(bg, c_n, "grand contract")
    for s in range(1, bg.grand + 1):
        idx = members(s)
        targets = [value(bg, i, c_n.column(i)) for i in idx]
        lp = _blocking_lp(bg, s, targets)
        out = solve(lp)
        if out.status is Status.INFEASIBLE:  # pragma: no cover - zero gain is always possible
            continue
        if out.status is Status.OPTIMAL and out.value <= 0:
            continue
        point = out.witness
        if out.status is Status.UNBOUNDED:
            # step along the ray until the gain is positive
            gain = out.ray[-1]
            step = (abs(out.witness[-1]) + 1) / gain
            point = tuple(p + step * r for p, r in zip(out.witness, out.ray))
        k = len(idx)
        rows = tuple(tuple(point[w * k + j] for j in range(k)) for w in range(bg.d))
        witness = Contract(s, rows)
        assert blocks(bg, witness, c_n)
        return witness
    return None


def ex_post_core_contains(
    bg: BelGame,
    world: Union[str, int, None] = None,
    x: Optional[Sequence[RationalLike]] = None,
    contract: Optional[Contract] = None,
    mode: str = "default",
) -> bool:
    """Ex-post core membership.

    ``default``: the realized world is known, so this is the classical core of
    that world's game at ``x``. ``ieong_shoham``: a full grand contract must
    lie in the classical core coalition-wise in every world at once.
    """
    if mode == "default":
        if world is None or x is None:
            raise InputError("default ex-post mode needs a world and a payoff vector")
        w = bg.world_index(world)
        return core_contains(bg.games[w], x)
    if mode == "ieong_shoham":
        if contract is None:
            raise InputError("ieong_shoham mode needs a grand contract")
        _shape(bg, contract)
        for w, g in enumerate(bg.games):
            row = contract.rows[w]
            if any(g(s) > coalition_sum(row, s) for s in range(1, bg.grand + 1)):
                return False
        return True
    raise InputError(f"unknown ex-post mode {mode!r}")


# ---------------------------------------------------------------------------
# common probability prior: expected game and core geometry


def _require_probability(bg: BelGame, what: str) -> tuple[Fraction, ...]:
    if not bg.probability:
        raise CapabilityError(f"{what} needs a common probability prior")
    return bg.priors[0].probabilities()


def _require_common(bg: BelGame, what: str) -> BeliefFunction:
    if not bg.common:
        raise InputError(f"{what} needs a common prior")
    return bg.priors[0]


def expected_game(bg: BelGame) -> Game:
    pi = _require_probability(bg, "the expected game")
    return game_from_function(bg.n, lambda s: expectation(pi, bg.worth(s)))


def expected_payoffs(bg: BelGame, c_n: Contract) -> tuple[Fraction, ...]:
    pi = _require_probability(bg, "expected payoffs")
    return tuple(expectation(pi, c_n.column(i)) for i in range(bg.n))


def core_basis(bg: BelGame) -> list[Contract]:
    """Direction vectors of the affine hull of the ex-ante core.

    For world ``k < d`` and player ``j > 1``: ``-1``/``+1`` for players 1/j in
    world ``k``, compensated in the last world by ``+/- pi_k / pi_d``.
    """
    pi = _require_probability(bg, "the core basis")
    if pi[-1] == 0:
        raise CapabilityError("the last world must have positive probability")
    out = []
    for k in range(bg.d - 1):
        ratio = pi[k] / pi[-1]
        for j in range(1, bg.n):
            rows = [[ZERO] * bg.n for _ in range(bg.d)]
            rows[k][0] = -ONE
            rows[k][j] = ONE
            rows[-1][0] += ratio
            rows[-1][j] -= ratio
            out.append(Contract(bg.grand, tuple(tuple(r) for r in rows)))
    return out


def pseudo_vertex(bg: BelGame, y: Sequence[RationalLike]) -> Contract:
    """Lift an efficient payoff of the expected game to a grand contract by
    spreading each world's deviation from the expected worth equally."""
    big = expected_game(bg)
    vec = to_vector(y, "y")
    if len(vec) != bg.n:
        raise InputError(f"y needs {bg.n} entries")
    if sum(vec, ZERO) != big(big.grand):
        raise InputError("y is not efficient for the expected game")
    rows = []
    for g in bg.games:
        shift = (g(g.grand) - big(big.grand)) / bg.n
        rows.append(tuple(v + shift for v in vec))
    return Contract(bg.grand, tuple(rows))


# ---------------------------------------------------------------------------
# convexity and marginal contracts


def is_ex_ante_convex(bg: BelGame) -> bool:
    nu = _require_common(bg, "ex-ante convexity")
    pl = nu.plausibility()
    low = [choquet(nu, bg.worth(s)) for s in range(bg.grand + 1)]
    high = [choquet(pl, bg.worth(s)) for s in range(bg.grand + 1)]
    for s in range(bg.grand + 1):
        for t in range(s, bg.grand + 1):
            if high[s] + high[t] > low[s | t] + low[s & t]:
                return False
    return True


def marginal_contract(bg: BelGame, sigma: Sequence[int]) -> Contract:
    order = check_permutation(sigma, bg.n)
    return Contract(bg.grand, tuple(marginal_vector(g, order) for g in bg.games))


def ex_ante_excess(bg: BelGame, s: int, c_n: Contract) -> Fraction:
    nu = _require_common(bg, "the ex-ante excess")
    _shape(bg, c_n)
    if not 0 < s <= bg.grand:
        raise InputError(f"coalition mask {s!r} out of range")
    return choquet(nu, bg.worth(s)) - sum((choquet(nu, c_n.column(i)) for i in members(s)), ZERO)


def ex_ante_excess_profile(bg: BelGame, c_n: Contract) -> tuple[Fraction, ...]:
    return tuple(
        sorted((ex_ante_excess(bg, s, c_n) for s in range(1, bg.grand + 1)), reverse=True)
    )


@dataclass(frozen=True)
class NucleolusFiber:
    """Efficient contracts whose expected payoffs equal ``target``."""

    target: tuple[Fraction, ...]
    directions: tuple[Contract, ...]

    @property
    def dimension(self) -> int:
        return len(self.directions)


def ex_ante_prenucleolus(bg: BelGame) -> tuple[Contract, NucleolusFiber]:
    """Representative pre-nucleolus contract and the fiber it belongs to.

    Under a common probability prior every excess depends on the contract
    only through expected payoffs, so the pre-nucleolus is the full set of
    efficient contracts that lift the expected game's pre-nucleolus.
    """
    big = expected_game(bg)
    y = prenucleolus(big)
    basis = core_basis(bg) if bg.d > 1 else []
    return pseudo_vertex(bg, y), NucleolusFiber(tuple(y), tuple(basis))


# ---------------------------------------------------------------------------
# bargaining sets


def counterblocks(bg: BelGame, c_alt: Contract, c_s: Contract, c_n: Contract) -> bool:
    """Whether ``c_alt`` (for coalition S') counters the objection ``c_s``:
    members shared with S do at least as well as under ``c_s``, the others at
    least as well as under ``c_n``, and someone strictly better."""
    _require_feasible(bg, c_alt, "counterblocking contract")
    _shape(bg, c_s)
    _shape(bg, c_n)
    strict = False
    for i in c_alt.players:
        ref = c_s if c_s.coalition >> i & 1 else c_n
        new, old = value(bg, i, c_alt.column(i)), value(bg, i, ref.column(i))
        if new < old:
            return False
        strict = strict or new > old
    return strict


@dataclass(frozen=True)
class LegitimateBlock:
    coalition: int
    expected: tuple[Fraction, ...]  # expected payoffs of the members
    margin: Fraction


def legitimate_block(bg: BelGame, c_n: Contract, strong: bool = False) -> Optional[LegitimateBlock]:
    """Under a common probability prior, find a coalition with an objection
    that no admissible coalition can counter.

    Only expected payoffs matter, so for each coalition S that can improve
    (``y(S) < V(S)``) an LP maximizes the smallest gain ``eps`` of an expected
    payoff ``z`` subject to ``z(S) <= V(S)`` and, for every admissible S',
    ``z(S' & S) + y(S' - S) >= V(S')``, which is exactly "S' cannot counter".
    """
    _require_feasible(bg, c_n, "grand contract")
    big = expected_game(bg)
    y = expected_payoffs(bg, c_n)
    for s in range(1, bg.grand + 1):
        if coalition_sum(y, s) >= big(s):
            continue
        idx = members(s)
        k = len(idx)
        rows = []
        for j, i in enumerate(idx):
            coeffs = [ZERO] * (k + 1)
            coeffs[j] = ONE
            coeffs[-1] = -ONE
            rows.append(Constraint(tuple(coeffs), GE, y[i]))
        rows.append(Constraint((ONE,) * k + (ZERO,), LE, big(s)))
        for t in range(1, bg.grand + 1):
            if strong and t & ~s == 0:
                continue
            coeffs = [ONE if t >> i & 1 else ZERO for i in idx] + [ZERO]
            outside = sum((y[i] for i in members(t & ~s)), ZERO)
            rows.append(Constraint(tuple(coeffs), GE, big(t) - outside))
        obj = (ZERO,) * k + (ONE,)
        out = solve(LinearProgram(k + 1, tuple(rows), obj, Sense.MAXIMIZE))
        if out.status is Status.OPTIMAL and out.value > 0:
            return LegitimateBlock(s, tuple(out.witness[:k]), out.value)
    return None


def bargaining_set_contains(bg: BelGame, c_n: Contract, strong: bool = False) -> Tristate:
    """Ex-ante (strong) bargaining set membership.

    Exact under a common probability prior. Otherwise the only certain case
    is a contract nobody can block at all, which is in every bargaining set.
    """
    _require_feasible(bg, c_n, "grand contract")
    if bg.probability:
        return Tristate.NO if legitimate_block(bg, c_n, strong) else Tristate.YES
    if find_blocking(bg, c_n) is None:
        return Tristate.YES
    return Tristate.UNDETERMINED

