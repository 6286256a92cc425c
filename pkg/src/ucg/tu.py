"""Deterministic TU games: cores, balanced collections, marginal vectors, nucleolus.

Coalitions are bitmasks over 0-based player indices (bit ``i`` set means
player ``i`` belongs to the coalition).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import CapabilityError, InputError
from .lp import (
    EQ,
    GE,
    AffineRow,
    Constraint,
    LinearProgram,
    Sense,
    Status,
    lex_minimax,
    solve,
)
from .rational import RationalLike, to_rational

MAX_PLAYERS = 16
MAX_BALANCED_N = 4

ZERO = Fraction(0)
ONE = Fraction(1)

PayoffVector = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# coalition helpers


def mask_of(players: Iterable[int]) -> int:
    m = 0
    for i in players:
        m |= 1 << i
    return m


def members(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def coalition_sum(x: Sequence[Fraction], mask: int) -> Fraction:
    return sum((x[i] for i in members(mask)), ZERO)


def subsets(mask: int) -> Iterable[int]:
    """All subsets of ``mask`` including the empty set and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def label(mask: int) -> str:
    """1-based display form, e.g. ``{1,2}``."""
    return "{" + ",".join(str(i + 1) for i in members(mask)) + "}"


# ---------------------------------------------------------------------------
# games


@dataclass(frozen=True)
class Game:
    n: int
    worth: tuple[Fraction, ...]

    @property
    def grand(self) -> int:
        return (1 << self.n) - 1

    def __call__(self, mask: int) -> Fraction:
        return self.worth[mask]

    def coalitions(self, include_empty: bool = False) -> range:
        return range(0 if include_empty else 1, 1 << self.n)

    def scale(self, alpha: RationalLike) -> "Game":
        a = to_rational(alpha)
        return Game(self.n, tuple(a * w for w in self.worth))

    def __add__(self, other: "Game") -> "Game":
        _same_n(self, other)
        return Game(self.n, tuple(a + b for a, b in zip(self.worth, other.worth)))

    def __sub__(self, other: "Game") -> "Game":
        _same_n(self, other)
        return Game(self.n, tuple(a - b for a, b in zip(self.worth, other.worth)))

    def restrict(self, mask: int) -> "Game":
        """Subgame on the members of ``mask``, relabelled 0..k-1."""
        mem = members(mask)
        k = len(mem)
        worth = []
        for sub in range(1 << k):
            worth.append(self.worth[mask_of(mem[i] for i in members(sub))])
        return Game(k, tuple(worth))


def _same_n(a: Game, b: Game) -> None:
    if a.n != b.n:
        raise InputError(f"games have different player counts ({a.n} vs {b.n})")


def make_game(n: int, worth_table: Union[Mapping[int, RationalLike], Sequence[RationalLike]]) -> Game:
    """Validate a worth table indexed by coalition bitmask.

    ``worth_table`` is a mapping ``mask -> worth`` (the empty coalition may be
    omitted) or a full sequence of length ``2**n``.
    """
    if not 1 <= n <= MAX_PLAYERS:
        raise InputError(f"player count must be in 1..{MAX_PLAYERS}, got {n}")
    size = 1 << n
    if isinstance(worth_table, Mapping):
        table = dict(worth_table)
        for key in table:
            if not isinstance(key, int) or not 0 <= key < size:
                raise InputError(f"coalition key {key!r} out of range for n={n}")
        table.setdefault(0, 0)
        missing = [m for m in range(size) if m not in table]
        if missing:
            raise InputError(f"worth table misses coalition {label(missing[0])}")
        values = [table[m] for m in range(size)]
    else:
        values = list(worth_table)
        if len(values) != size:
            raise InputError(f"worth table has {len(values)} entries, expected {size}")
    worth = tuple(to_rational(v, f"worth{label(m)}") for m, v in enumerate(values))
    if worth[0] != 0:
        raise InputError("worth of the empty coalition must be 0")
    return Game(n, worth)


def game_from_function(n: int, f: Callable[[int], RationalLike]) -> Game:
    return make_game(n, {m: (f(m) if m else 0) for m in range(1 << n)})


def additive_game(weights: Sequence[RationalLike]) -> Game:
    w = [to_rational(a) for a in weights]
    return game_from_function(len(w), lambda m: sum((w[i] for i in members(m)), ZERO))


# Shared fixtures
G_ADD = additive_game([1, 2, 3])
G_PAIR = game_from_function(3, lambda m: {1: 0, 2: 1, 3: 1}[popcount(m)])
G_CONV = game_from_function(3, lambda m: popcount(m) ** 2)


def classify_game(g: Game) -> dict[str, bool]:
    superadditive = True
    convex = True
    for s in g.coalitions():
        for t in g.coalitions():
            lhs = g(s | t) + g(s & t)
            rhs = g(s) + g(t)
            if lhs < rhs:
                convex = False
                if s & t == 0:
                    superadditive = False
        if not superadditive:
            break
    return {"superadditive": superadditive, "convex": convex}


# ---------------------------------------------------------------------------
# payoff vectors and excesses


def payoff(g: Game, x: Iterable[RationalLike]) -> PayoffVector:
    vec = tuple(to_rational(v, f"x[{k}]") for k, v in enumerate(x))
    if len(vec) != g.n:
        raise InputError(f"payoff has length {len(vec)}, expected {g.n}")
    return vec


def excess(g: Game, mask: int, x: Sequence[Fraction]) -> Fraction:
    return g(mask) - coalition_sum(x, mask)


def excess_profile(g: Game, x: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    """All nonempty-coalition excesses in nonincreasing order."""
    vec = payoff(g, x)
    return tuple(sorted((excess(g, m, vec) for m in g.coalitions()), reverse=True))


def lex_compare(a: Sequence[Fraction], b: Sequence[Fraction]) -> int:
    """-1, 0 or 1 as ``a`` is lexicographically below, equal to or above ``b``."""
    if len(a) != len(b):
        raise InputError("profiles have different lengths")
    for u, v in zip(a, b):
        if u != v:
            return -1 if u < v else 1
    return 0


def lex_leq(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    return lex_compare(a, b) <= 0


def is_efficient(g: Game, x: Sequence[Fraction]) -> bool:
    return sum(x, ZERO) == g(g.grand)


def core_contains(g: Game, x: Iterable[RationalLike]) -> bool:
    vec = payoff(g, x)
    if not is_efficient(g, vec):
        return False
    return all(coalition_sum(vec, m) >= g(m) for m in g.coalitions())


def core_violations(g: Game, x: Iterable[RationalLike]) -> list[tuple[int, Fraction]]:
    """Coalitions with positive excess, worst first (ties by mask)."""
    vec = payoff(g, x)
    bad = [(m, excess(g, m, vec)) for m in g.coalitions() if excess(g, m, vec) > 0]
    return sorted(bad, key=lambda t: (-t[1], t[0]))


# ---------------------------------------------------------------------------
# balanced collections


@dataclass(frozen=True)
class BalancedCollection:
    n: int
    members: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def weight_of(self, mask: int) -> Fraction:
        return self.weights[self.members.index(mask)]

    def is_balancing(self) -> bool:
        if any(w <= 0 for w in self.weights):
            return False
        for i in range(self.n):
            total = sum((w for m, w in zip(self.members, self.weights) if m >> i & 1), ZERO)
            if total != 1:
                return False
        return True

    def weighted_worth(self, g: Game) -> Fraction:
        return sum((w * g(m) for m, w in zip(self.members, self.weights)), ZERO)


def _solve_square(cols: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[list[Fraction]]:
    """Solve ``A lam = rhs`` with ``A`` given by columns, requiring independent
    columns and consistency. Returns None when either fails."""
    m = len(rhs)
    k = len(cols)
    aug = [[cols[c][r] for c in range(k)] + [rhs[r]] for r in range(m)]
    piv_cols = []
    row = 0
    for c in range(k):
        p = next((r for r in range(row, m) if aug[r][c] != 0), None)
        if p is None:
            return None  # dependent column
        aug[row], aug[p] = aug[p], aug[row]
        inv = 1 / aug[row][c]
        aug[row] = [a * inv for a in aug[row]]
        for r in range(m):
            if r != row and aug[r][c]:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        piv_cols.append(c)
        row += 1
    if any(aug[r][k] != 0 for r in range(row, m)):
        return None
    return [aug[r][k] for r in range(k)]


@lru_cache(maxsize=None)
def minimal_balanced_collections(n: int) -> tuple[BalancedCollection, ...]:
    """All minimal balanced collections on ``n`` players (``n <= 4``).

    A collection is minimal balanced iff its incidence vectors are linearly
    independent and the unique solution of the balancing system is positive;
    such a collection has at most ``n`` members, so enumeration is finite.
    """
    if n < 1:
        raise InputError("n must be positive")
    if n > MAX_BALANCED_N:
        raise CapabilityError(
            f"minimal balanced collection enumeration is limited to n <= {MAX_BALANCED_N}"
        )
    grand = (1 << n) - 1
    ones = [ONE] * n
    found = []
    for k in range(1, n + 1):
        for combo in itertools.combinations(range(1, grand + 1), k):
            cols = [[ONE if m >> i & 1 else ZERO for i in range(n)] for m in combo]
            lam = _solve_square(cols, ones)
            if lam is not None and all(w > 0 for w in lam):
                found.append(BalancedCollection(n, tuple(combo), tuple(lam)))
    return tuple(found)


def balancedness_violation(g: Game) -> Optional[BalancedCollection]:
    """First minimal balanced collection with ``sum lam v > v(N)``, if any."""
    vn = g(g.grand)
    for coll in minimal_balanced_collections(g.n):
        if coll.weighted_worth(g) > vn:
            return coll
    return None


def is_balanced(g: Game) -> bool:
    return balancedness_violation(g) is None


# ---------------------------------------------------------------------------
# core emptiness


def core_lp(g: Game, objective: Optional[Sequence[Fraction]] = None) -> LinearProgram:
    rows = []
    for m in g.coalitions():
        coeffs = tuple(ONE if m >> i & 1 else ZERO for i in range(g.n))
        rel = EQ if m == g.grand else GE
        rows.append(Constraint(coeffs, rel, g(m)))
    if objective is None:
        return LinearProgram(g.n, tuple(rows))
    return LinearProgram(g.n, tuple(rows), tuple(objective), Sense.MINIMIZE)


@dataclass(frozen=True)
class CoreEmptiness:
    empty: bool
    core_point: Optional[PayoffVector] = None
    collection: Optional[BalancedCollection] = None


def _vertex_collection(g: Game, support: Sequence[int]) -> BalancedCollection:
    """A basic optimal solution of max sum lam v over balancing weights on
    ``support``; basic solutions have independent columns, hence are minimal."""
    cons = []
    for i in range(g.n):
        cons.append(Constraint(tuple(ONE if m >> i & 1 else ZERO for m in support), EQ, ONE))
    obj = tuple(g(m) for m in support)
    lp = LinearProgram(len(support), tuple(cons), obj, Sense.MAXIMIZE, frozenset(range(len(support))))
    out = solve(lp)
    pairs = [(m, w) for m, w in zip(support, out.witness) if w > 0]
    return BalancedCollection(g.n, tuple(m for m, _ in pairs), tuple(w for _, w in pairs))


def core_emptiness(g: Game) -> CoreEmptiness:
    """Decide core emptiness by LP.

    Nonempty: returns a core point. Empty: the Farkas certificate of the core
    system yields balancing weights on its support, refined to a minimal
    balanced collection with ``sum lam_S v(S) > v(N)``.
    """
    lp = core_lp(g)
    out = solve(lp)
    if out.status is Status.OPTIMAL:
        return CoreEmptiness(False, core_point=out.witness)
    masks = list(g.coalitions())
    cert = out.certificate
    k_grand = masks.index(g.grand)
    scale = cert[k_grand]
    support = [m for m, y in zip(masks, cert) if m != g.grand and y > 0]
    raw = BalancedCollection(
        g.n, tuple(support), tuple(cert[masks.index(m)] / scale for m in support)
    )
    assert raw.is_balancing() and raw.weighted_worth(g) > g(g.grand)
    coll = _vertex_collection(g, support)
    return CoreEmptiness(True, collection=coll)


# ---------------------------------------------------------------------------
# marginal vectors


def check_permutation(sigma: Sequence[int], n: int) -> tuple[int, ...]:
    perm = tuple(sigma)
    if sorted(perm) != list(range(n)):
        raise InputError(f"{list(perm)} is not a permutation of 0..{n - 1}")
    return perm


def marginal_vector(g: Game, sigma: Sequence[int]) -> PayoffVector:
    """``sigma`` lists 0-based players in order of arrival."""
    perm = check_permutation(sigma, g.n)
    x = [ZERO] * g.n
    prev = 0
    for i in perm:
        cur = prev | (1 << i)
        x[i] = g(cur) - g(prev)
        prev = cur
    return tuple(x)


def all_marginal_vectors(g: Game) -> list[PayoffVector]:
    return [marginal_vector(g, p) for p in itertools.permutations(range(g.n))]


def core_vertices(g: Game) -> list[PayoffVector]:
    """Brute-force vertex enumeration of the core polytope.

    Every vertex is the unique solution of ``x(N) = v(N)`` plus ``n - 1``
    tight coalition constraints; all such systems are solved and filtered.
    """
    n = g.n
    proper = [m for m in g.coalitions() if m != g.grand]
    found = set()
    for combo in itertools.combinations(proper, n - 1):
        tight = (g.grand,) + combo
        # rows of the system are coalitions; transpose into columns per player
        cols = [[ONE if m >> i & 1 else ZERO for m in tight] for i in range(n)]
        x = _solve_square(cols, [g(m) for m in tight])
        if x is None:
            continue
        if core_contains(g, x):
            found.add(tuple(x))
    return sorted(found)


# ---------------------------------------------------------------------------
# nucleolus

Region = Union[str, Sequence[Constraint]]


def region_lp(g: Game, region: Region = "pre-imputations") -> LinearProgram:
    ones = (ONE,) * g.n
    rows = [Constraint(ones, EQ, g(g.grand))]
    if isinstance(region, str):
        if region == "imputations":
            for i in range(g.n):
                unit = tuple(ONE if k == i else ZERO for k in range(g.n))
                rows.append(Constraint(unit, GE, g(1 << i)))
        elif region != "pre-imputations":
            raise InputError(f"unknown region {region!r}")
        return LinearProgram(g.n, tuple(rows))
    # explicit H-polytope: taken as given, efficiency not added
    cons = tuple(region)
    for c in cons:
        if len(c.coeffs) != g.n:
            raise InputError("region constraint has wrong dimension")
    return LinearProgram(g.n, cons)


def excess_rows(g: Game) -> list[AffineRow]:
    rows = []
    for m in g.coalitions():
        coeffs = tuple(-ONE if m >> i & 1 else ZERO for i in range(g.n))
        rows.append(AffineRow(coeffs, g(m)))
    return rows


def nucleolus(g: Game, region: Region = "pre-imputations") -> PayoffVector:
    """Lexicographic minimizer of the excess profile over ``region``.

    ``region`` is ``"pre-imputations"`` (the pre-nucleolus),
    ``"imputations"``, or a sequence of :class:`~ucg.lp.Constraint` describing
    an explicit polytope.
    """
    base = region_lp(g, region)
    if solve(base).status is Status.INFEASIBLE:
        raise InputError("nucleolus: region is empty")
    return lex_minimax(base, excess_rows(g)).point


def prenucleolus(g: Game) -> PayoffVector:
    return nucleolus(g, "pre-imputations")
