"""Seeded random instances for property tests and acceptance harnesses.

Every generator takes a :class:`random.Random` so runs are reproducible.
Values are small integers or simple fractions to keep exact arithmetic cheap.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

from .bel import BelGame, Contract, make_bel_game
from .chance import ChanceGame, StochasticGame, make_chance_game, make_stochastic_game
from .state import TUUGame, UncertainPair, make_tuu_game, make_uncertain_pair
from .tu import Game, game_from_function, make_game, popcount, subsets
from .uncertainty import (
    BeliefFunction,
    Capacity,
    DiscreteDistribution,
    make_belief,
    make_capacity,
    make_distribution,
    point_mass,
    probability,
)

ZERO = Fraction(0)


def random_game(rng: random.Random, n: int, lo: int = -3, hi: int = 6) -> Game:
    table = [0] + [rng.randint(lo, hi) for _ in range((1 << n) - 1)]
    return make_game(n, table)


def random_convex_game(rng: random.Random, n: int, max_weight: int = 3) -> Game:
    """Nonnegative combination of unanimity games plus an additive part.

    Unanimity games ``u_T(S) = [T <= S]`` are convex and convexity is kept
    under nonnegative sums.
    """
    grand = (1 << n) - 1
    weights = {t: rng.randint(0, max_weight) for t in range(1, grand + 1) if popcount(t) > 1}
    base = [rng.randint(-2, 3) for _ in range(n)]

    def worth(s: int) -> int:
        additive = sum(base[i] for i in range(n) if s >> i & 1)
        return additive + sum(w for t, w in weights.items() if t & s == t)

    return game_from_function(n, worth)


def random_nonnegative_convex_game(rng: random.Random, n: int) -> Game:
    grand = (1 << n) - 1
    weights = {t: rng.randint(0, 3) for t in range(1, grand + 1)}
    return game_from_function(n, lambda s: sum(w for t, w in weights.items() if t & s == t))


def random_payoff(rng: random.Random, n: int, total: Fraction, spread: int = 4) -> tuple[Fraction, ...]:
    """Random efficient vector with quarter-integer entries (except the last)."""
    head = [Fraction(rng.randint(-4 * spread, 4 * spread), 4) for _ in range(n - 1)]
    return tuple(head) + (Fraction(total) - sum(head, ZERO),)


def random_distribution(
    rng: random.Random, max_atoms: int = 3, lo: int = 0, hi: int = 6, denominator: int = 4
) -> DiscreteDistribution:
    k = rng.randint(1, max_atoms)
    values = rng.sample(range(lo, hi + 1), k)
    cuts = sorted(rng.sample(range(1, denominator), k - 1)) if k > 1 else []
    bounds = [0] + cuts + [denominator]
    return make_distribution(
        [(v, Fraction(bounds[j + 1] - bounds[j], denominator)) for j, v in enumerate(values)]
    )


def random_chance_game(rng: random.Random, n: int, max_atoms: int = 3) -> ChanceGame:
    grand = (1 << n) - 1
    table = {}
    for s in range(1, grand + 1):
        hi = 2 * popcount(s) + 1
        table[s] = random_distribution(rng, max_atoms, 0, hi)
    return make_chance_game(n, table)


def point_mass_chance_game(g: Game) -> ChanceGame:
    return make_chance_game(g.n, {s: point_mass(g(s)) for s in range(1, g.grand + 1)})


def random_stochastic_game(
    rng: random.Random, n: int, max_actions: int = 2, max_atoms: int = 3
) -> StochasticGame:
    grand = (1 << n) - 1
    actions = {}
    for s in range(1, grand + 1):
        count = rng.randint(1, max_actions)
        hi = 2 * popcount(s) + 2
        actions[s] = {f"a{k + 1}": random_distribution(rng, max_atoms, 0, hi) for k in range(count)}
    alphas = [Fraction(rng.randint(1, 3), 4) for _ in range(n)]
    return make_stochastic_game(n, actions, alphas)


def random_uncertain_pair(rng: random.Random, n: int = 3, max_family: int = 6) -> UncertainPair:
    w = random_game(rng, n, -2, 4)
    w2 = random_game(rng, n, -2, 4)
    proper = list(range(1, (1 << n) - 1))
    family = rng.sample(proper, rng.randint(1, min(max_family, len(proper))))
    return make_uncertain_pair(w, w2, family)


def random_tuu_game(rng: random.Random, n: int = 2, states: int = 2, swapped: Optional[bool] = None) -> TUUGame:
    """Integer-worth games. Slopes are either all 1 or, with two players and
    two states, the swapped pair (1,2)/(2,1)."""
    games = [random_game(rng, n, -1, 4) for _ in range(states)]
    if swapped is None:
        swapped = rng.random() < 0.5
    if swapped and n == 2 and states == 2:
        slopes = [[1, 2], [2, 1]]
    else:
        slopes = [[1] * n for _ in range(states)]
    return make_tuu_game([f"s{k + 1}" for k in range(states)], games, slopes)


def random_capacity(rng: random.Random, d: int, denominator: int = 8) -> Capacity:
    """Monotone set function built level by level above the max of subsets."""
    full = (1 << d) - 1
    vals = [Fraction(0)] * (full + 1)
    for a in sorted(range(1, full), key=popcount):
        floor = max((vals[a & ~(1 << k)] for k in range(d) if a >> k & 1), default=Fraction(0))
        steps = denominator - int(floor * denominator)
        vals[a] = floor + Fraction(rng.randint(0, max(0, steps // 2)), denominator)
    vals[full] = Fraction(1)
    return make_capacity(d, vals)


def random_belief(rng: random.Random, d: int, focal: int = 3, denominator: int = 10) -> BeliefFunction:
    """Random mass function whose focal elements cover every world."""
    full = (1 << d) - 1
    sets = set(rng.sample(range(1, full + 1), min(focal, full)))
    covered = 0
    for a in sets:
        covered |= a
    if covered != full:
        sets.add(full)
    sets = sorted(sets)
    cuts = sorted(rng.sample(range(1, denominator), len(sets) - 1)) if len(sets) > 1 else []
    bounds = [0] + cuts + [denominator]
    mass = {a: Fraction(bounds[j + 1] - bounds[j], denominator) for j, a in enumerate(sets)}
    return make_belief(d, mass)


def random_probability(rng: random.Random, d: int, denominator: int = 6) -> BeliefFunction:
    """Strictly positive probability vector."""
    if d == 1:
        return probability(1, [1])
    cuts = sorted(rng.sample(range(1, denominator), d - 1))
    bounds = [0] + cuts + [denominator]
    return probability(d, [Fraction(bounds[k + 1] - bounds[k], denominator) for k in range(d)])


def random_bel_game(rng: random.Random, n: int, d: int, prior: BeliefFunction) -> BelGame:
    return make_bel_game(prior, [random_game(rng, n, -1, 5) for _ in range(d)])


def convex_probability_bel_game(rng: random.Random, n: int, d: int) -> BelGame:
    """Common probability prior whose expected game is convex: world games are
    independent convex games, and convexity survives averaging."""
    pi = random_probability(rng, d)
    return make_bel_game(pi, [random_convex_game(rng, n) for _ in range(d)])


def convex_belief_bel_game(rng: random.Random, n: int, d: int) -> BelGame:
    """Common belief prior for which the game is ex-ante convex.

    Ex-ante convexity with ``S = T`` forces every worth profile to have equal
    belief and plausibility expectations, i.e. to be constant on each focal
    element. So worlds are grouped into blocks that serve as focal elements,
    worlds in a block share one convex game, and the masses are random.
    """
    labels = list(range(d))
    rng.shuffle(labels)
    cuts = sorted(rng.sample(range(1, d), rng.randint(0, d - 1))) if d > 1 else []
    bounds = [0] + cuts + [d]
    blocks = [labels[bounds[k] : bounds[k + 1]] for k in range(len(bounds) - 1)]
    denominator = 10
    parts = sorted(rng.sample(range(1, denominator), len(blocks) - 1)) if len(blocks) > 1 else []
    edges = [0] + parts + [denominator]
    mass = {}
    games: list[Optional[Game]] = [None] * d
    for k, block in enumerate(blocks):
        mask = sum(1 << w for w in block)
        mass[mask] = Fraction(edges[k + 1] - edges[k], denominator)
        g = random_convex_game(rng, n)
        for w in block:
            games[w] = g
    return make_bel_game(make_belief(d, mass), games)


def random_efficient_contract(
    rng: random.Random, bg: BelGame, spread: int = 3
) -> Contract:
    rows = []
    for g in bg.games:
        rows.append(random_payoff(rng, bg.n, g(g.grand), spread))
    return Contract(bg.grand, tuple(rows))


def all_orders(n: int) -> list[tuple[int, ...]]:
    return list(permutations(range(n)))


def grid(lo: Fraction, hi: Fraction, step: Fraction) -> list[Fraction]:
    out = []
    v = Fraction(lo)
    while v <= hi:
        out.append(v)
        v += step
    return out


def simplex_grid(n: int, total: Fraction, step: Fraction) -> list[tuple[Fraction, ...]]:
    """Nonnegative vectors on a ``step`` lattice summing to ``total``."""
    if n == 1:
        return [(Fraction(total),)] if total >= 0 else []
    out = []
    for head in grid(Fraction(0), Fraction(total), step):
        for tail in simplex_grid(n - 1, total - head, step):
            out.append((head,) + tail)
    return out


def nonempty_subsets(mask: int) -> list[int]:
    return [s for s in subsets(mask) if s]


def blocks_product_grid(
    n: int, blocks: Sequence[int], budgets: Sequence[Fraction], step: Fraction
) -> list[tuple[Fraction, ...]]:
    """Nonnegative lattice points with block sums fixed to the budgets."""
    points: list[list[Fraction]] = [[Fraction(0)] * n]
    for b, q in zip(blocks, budgets):
        idx = [i for i in range(n) if b >> i & 1]
        new = []
        for part in simplex_grid(len(idx), q, step):
            for p in points:
                x = list(p)
                for i, v in zip(idx, part):
                    x[i] = v
                new.append(x)
        points = new
    return [tuple(p) for p in points]
