"""Finite distributions with quantiles, and capacities with Mobius calculus.

World subsets are bitmasks over 0-based world indices, exactly like
coalitions over players.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import InputError
from .rational import RationalLike, to_rational

MAX_WORLDS = 12

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# discrete distributions


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite-support random variable; atoms sorted by strictly increasing value."""

    atoms: tuple[tuple[Fraction, Fraction], ...]

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(v for v, _ in self.atoms)

    def cdf(self, t: RationalLike) -> Fraction:
        t = to_rational(t)
        total = ZERO
        for v, p in self.atoms:
            if v > t:
                break
            total += p
        return total

    def mean(self) -> Fraction:
        return sum((v * p for v, p in self.atoms), ZERO)

    def cumulative(self) -> list[tuple[Fraction, Fraction]]:
        """``(value, F(value))`` at each atom."""
        out = []
        total = ZERO
        for v, p in self.atoms:
            total += p
            out.append((v, total))
        return out

    @property
    def is_point_mass(self) -> bool:
        return len(self.atoms) == 1


def make_distribution(
    atoms: Union[Mapping[RationalLike, RationalLike], Iterable[tuple[RationalLike, RationalLike]]],
) -> DiscreteDistribution:
    pairs = atoms.items() if isinstance(atoms, Mapping) else atoms
    parsed = []
    for k, (v, p) in enumerate(pairs):
        parsed.append((to_rational(v, f"atom[{k}].value"), to_rational(p, f"atom[{k}].mass")))
    if not parsed:
        raise InputError("distribution needs at least one atom")
    values = [v for v, _ in parsed]
    if len(set(values)) != len(values):
        raise InputError("duplicate atom values")
    if any(p <= 0 for _, p in parsed):
        raise InputError("atom masses must be positive")
    total = sum((p for _, p in parsed), ZERO)
    if total != 1:
        raise InputError(f"atom masses sum to {total}, expected 1")
    return DiscreteDistribution(tuple(sorted(parsed)))


def point_mass(value: RationalLike) -> DiscreteDistribution:
    return make_distribution([(value, 1)])


def _check_alpha(alpha: RationalLike) -> Fraction:
    a = to_rational(alpha, "alpha")
    if not 0 < a < 1:
        raise InputError(f"fractile must lie strictly between 0 and 1, got {a}")
    return a


def quantile(dist: DiscreteDistribution, alpha: RationalLike, side: str = "left") -> Fraction:
    """Quantile of a step cdf.

    ``left``:  min{t : F(t) >= alpha}  (budget fractile)
    ``right``: sup{t : F(t) <= alpha}  (quantile preference); for a step
    function this is the first atom at which F strictly exceeds alpha.
    """
    a = _check_alpha(alpha)
    if side not in ("left", "right"):
        raise InputError(f"quantile side must be 'left' or 'right', got {side!r}")
    for v, cum in dist.cumulative():
        if (side == "left" and cum >= a) or (side == "right" and cum > a):
            return v
    raise AssertionError("cdf never reaches 1")  # pragma: no cover


def fosd_dominates(x: DiscreteDistribution, y: DiscreteDistribution) -> bool:
    """First-order dominance: F_x(t) <= F_y(t) at every breakpoint."""
    points = sorted(set(x.values) | set(y.values))
    return all(x.cdf(t) <= y.cdf(t) for t in points)


# ---------------------------------------------------------------------------
# capacities


@dataclass(frozen=True)
class Capacity:
    worlds: tuple[str, ...]
    value: tuple[Fraction, ...]

    @property
    def d(self) -> int:
        return len(self.worlds)

    @property
    def full(self) -> int:
        return (1 << self.d) - 1

    def __call__(self, mask: int) -> Fraction:
        return self.value[mask]

    def dual(self) -> "Capacity":
        full = self.full
        return Capacity(self.worlds, tuple(1 - self.value[full & ~a] for a in range(full + 1)))

    def is_additive(self) -> bool:
        return all(m == 0 for a, m in enumerate(mobius(self.value)) if a & (a - 1))


def _worlds(worlds: Union[int, Sequence[str]]) -> tuple[str, ...]:
    if isinstance(worlds, int):
        labels = tuple(f"w{k + 1}" for k in range(worlds))
    else:
        labels = tuple(str(w) for w in worlds)
    if not 1 <= len(labels) <= MAX_WORLDS:
        raise InputError(f"world count must be in 1..{MAX_WORLDS}, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise InputError("duplicate world labels")
    return labels


def _table(d: int, table, what: str) -> list[Fraction]:
    size = 1 << d
    if isinstance(table, Mapping):
        vals = [ZERO] * size
        for key, v in table.items():
            if not isinstance(key, int) or not 0 <= key < size:
                raise InputError(f"{what}: subset key {key!r} out of range")
            vals[key] = to_rational(v, f"{what}[{key}]")
        return vals
    vals = [to_rational(v, f"{what}[{k}]") for k, v in enumerate(table)]
    if len(vals) != size:
        raise InputError(f"{what}: expected {size} entries, got {len(vals)}")
    return vals


def make_capacity(worlds: Union[int, Sequence[str]], table) -> Capacity:
    """Validate a capacity given as a full table or a ``mask -> value`` map
    (missing subsets default to 0)."""
    labels = _worlds(worlds)
    vals = _table(len(labels), table, "capacity")
    full = (1 << len(labels)) - 1
    if vals[0] != 0:
        raise InputError("capacity of the empty set must be 0")
    if vals[full] != 1:
        raise InputError("capacity of the full world set must be 1")
    for a in range(full + 1):
        for k in range(len(labels)):
            b = a | (1 << k)
            if vals[a] > vals[b]:
                raise InputError("capacity is not monotone")
    return Capacity(labels, tuple(vals))


def mobius(values: Sequence[Fraction]) -> list[Fraction]:
    """Mobius inverse of a set function given as a table over bitmasks."""
    m = list(values)
    size = len(m)
    bit = 1
    while bit < size:
        for a in range(size):
            if a & bit:
                m[a] -= m[a ^ bit]
        bit <<= 1
    return m


def zeta(mass: Sequence[Fraction]) -> list[Fraction]:
    """Inverse of :func:`mobius`: ``nu(A) = sum_{B subset A} m(B)``."""
    v = list(mass)
    size = len(v)
    bit = 1
    while bit < size:
        for a in range(size):
            if a & bit:
                v[a] += v[a ^ bit]
        bit <<= 1
    return v


@dataclass(frozen=True)
class MobiusResult:
    mass: tuple[Fraction, ...]
    is_belief: bool
    is_probability: bool


def mobius_inverse(cap: Capacity) -> MobiusResult:
    m = tuple(mobius(cap.value))
    belief = all(v >= 0 for v in m)
    prob = belief and all(v == 0 for a, v in enumerate(m) if a & (a - 1))
    return MobiusResult(m, belief, prob)


@dataclass(frozen=True)
class BeliefFunction:
    capacity: Capacity
    mass: tuple[Fraction, ...]

    @property
    def worlds(self) -> tuple[str, ...]:
        return self.capacity.worlds

    @property
    def d(self) -> int:
        return self.capacity.d

    def __call__(self, mask: int) -> Fraction:
        return self.capacity(mask)

    def plausibility(self) -> Capacity:
        return self.capacity.dual()

    def focal_elements(self) -> tuple[int, ...]:
        return tuple(a for a, m in enumerate(self.mass) if m > 0)

    @property
    def is_probability(self) -> bool:
        return all(a & (a - 1) == 0 for a in self.focal_elements())

    def probabilities(self) -> tuple[Fraction, ...]:
        """Point probabilities; only meaningful when :attr:`is_probability`."""
        return tuple(self.mass[1 << k] for k in range(self.d))


def make_belief(worlds: Union[int, Sequence[str]], mass_table) -> BeliefFunction:
    labels = _worlds(worlds)
    d = len(labels)
    mass = _table(d, mass_table, "mass")
    if mass[0] != 0:
        raise InputError("mass of the empty set must be 0")
    if any(m < 0 for m in mass):
        raise InputError("negative mass")
    total = sum(mass, ZERO)
    if total != 1:
        raise InputError(f"mass sum ≠ 1 (got {total})")
    covered = 0
    for a, m in enumerate(mass):
        if m > 0:
            covered |= a
    if covered != (1 << d) - 1:
        missing = [labels[k] for k in range(d) if not covered >> k & 1]
        raise InputError(f"focal elements do not cover world(s) {', '.join(missing)}")
    cap = Capacity(labels, tuple(zeta(mass)))
    return BeliefFunction(cap, tuple(mass))


def probability(worlds: Union[int, Sequence[str]], probs: Sequence[RationalLike]) -> BeliefFunction:
    labels = _worlds(worlds)
    if len(probs) != len(labels):
        raise InputError("one probability per world expected")
    return make_belief(labels, {1 << k: p for k, p in enumerate(probs)})


# ---------------------------------------------------------------------------
# Choquet integral

CapacityLike = Union[Capacity, BeliefFunction]


def _cap(c: CapacityLike) -> Capacity:
    return c.capacity if isinstance(c, BeliefFunction) else c


def choquet(cap: CapacityLike, x: Sequence[RationalLike]) -> Fraction:
    """Choquet expectation by the telescoping sum over a nonincreasing
    rearrangement of ``x`` (ties broken by world index)."""
    c = _cap(cap)
    vals = [to_rational(v) for v in x]
    if len(vals) != c.d:
        raise InputError(f"random quantity has {len(vals)} entries, expected {c.d}")
    order = sorted(range(c.d), key=lambda k: (-vals[k], k))
    total = ZERO
    prefix = 0
    for pos, k in enumerate(order):
        prefix |= 1 << k
        nxt = vals[order[pos + 1]] if pos + 1 < c.d else ZERO
        total += (vals[k] - nxt) * c(prefix)
    return total


def expectation(probs: Sequence[Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((p * v for p, v in zip(probs, x)), ZERO)
