import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucg.chance import (
    budget_lp,
    budgets,
    grand_structure,
    make_chance_game,
    make_sb_allocation,
    make_stochastic_game,
    make_structure,
    posterior_adjust,
    prior_budget_check,
    prior_nucleolus,
    probabilistic_excess,
    probabilistic_excess_profile,
    quantile_game,
    sb_core_contains,
    sb_find_core_allocation,
    sb_is_balanced,
    sb_payoffs,
)
from ucg.errors import InputError
from ucg.generators import (
    blocks_product_grid,
    point_mass_chance_game,
    random_chance_game,
    random_stochastic_game,
)
from ucg.lp import solve
from ucg.tu import G_ADD, G_PAIR, lex_compare
from ucg.uncertainty import point_mass

HALF = F(1, 2)


@pytest.fixture
def cg1(d24):
    return make_chance_game(2, {1: point_mass(0), 2: point_mass(0), 3: d24})


@pytest.fixture
def cs_half():
    return grand_structure(2, HALF)


def _grid_optimum(cg, cs, step=F(1, 4)):
    best = None
    for x in blocks_product_grid(cg.n, cs.blocks, budgets(cg, cs), step):
        prof = probabilistic_excess_profile(cg, x)
        if best is None or lex_compare(prof, best) < 0:
            best = prof
    return best


def _deterministic(g):
    return {m: {"a": point_mass(g(m))} for m in range(1, g.grand + 1)}


def test_budget_examples(cg1, cs_half):
    assert budgets(cg1, cs_half) == (2,)
    assert prior_budget_check(cg1, [1, 1], cs_half)
    assert not prior_budget_check(cg1, [2, 1], cs_half)
    singles = make_structure(2, [1, 2], [HALF, HALF])
    assert prior_budget_check(cg1, [0, 0], singles)
    with pytest.raises(InputError):
        prior_budget_check(cg1, [-1, 3], cs_half)


def test_structure_validation():
    with pytest.raises(InputError):
        make_structure(3, [0b011, 0b110], [HALF, HALF])
    with pytest.raises(InputError):
        make_structure(3, [0b011], [HALF])
    with pytest.raises(InputError):
        make_structure(2, [0b11], [1])


def test_chance_game_validation(d24):
    with pytest.raises(InputError, match="missing"):
        make_chance_game(2, {1: point_mass(0), 3: d24})
    with pytest.raises(InputError, match="nonnegative"):
        make_chance_game(2, {1: point_mass(-1), 2: point_mass(0), 3: d24})


def test_probabilistic_excess_examples(cg1):
    assert probabilistic_excess(cg1, 3, [1, 1]) == HALF
    assert probabilistic_excess(cg1, 1, [1, 1]) == 0
    assert probabilistic_excess(cg1, 3, [0, 0]) == 1


def test_budget_lp_feasible(cg1, cs_half):
    out = solve(budget_lp(cg1, cs_half))
    assert out.optimal and sum(out.witness) == 2


def test_prior_nucleolus_symmetric(cg1, cs_half):
    res = prior_nucleolus(cg1, cs_half)
    assert res.point == (1, 1)
    assert res.excess == (HALF, 0, 0)
    assert res.excess == _grid_optimum(cg1, cs_half)
    # every split of the budget ties at (1/2, 0, 0)
    assert not res.unique


def test_prior_nucleolus_asymmetric(d24, cs_half):
    cg = make_chance_game(2, {1: point_mass(2), 2: point_mass(0), 3: d24})
    res = prior_nucleolus(cg, cs_half)
    assert res.point == (2, 0)
    assert res.excess == _grid_optimum(cg, cs_half)
    levels = [stage.level for stage in res.trace]
    assert levels == sorted(levels, reverse=True)


def test_prior_nucleolus_singleton_blocks(d24):
    cg = make_chance_game(2, {1: point_mass(0), 2: point_mass(0), 3: d24})
    cs = make_structure(2, [1, 2], [HALF, HALF])
    assert prior_nucleolus(cg, cs).point == (0, 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from([F(1, 4), HALF, F(3, 4)]))
def test_prior_nucleolus_matches_grid(seed, alpha):
    cg = random_chance_game(random.Random(seed), 2)
    cs = grand_structure(2, alpha)
    res = prior_nucleolus(cg, cs)
    assert prior_budget_check(cg, res.point, cs)
    assert res.excess == probabilistic_excess_profile(cg, res.point)
    assert res.excess == _grid_optimum(cg, cs)


def test_posterior_adjust_examples(cs_half):
    assert posterior_adjust([1, 2], {3: 6}, cs_half) == (2, 4)
    assert posterior_adjust([1, 2], {3: 3}, cs_half) == (1, 2)
    assert posterior_adjust([0, 0], {3: 6}, cs_half) == (3, 3)
    with pytest.raises(InputError):
        posterior_adjust([1, 2], {}, cs_half)
    with pytest.raises(InputError):
        posterior_adjust([1, 2], {3: -1}, cs_half)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(0, 6), min_size=3, max_size=3),
    st.integers(0, 12),
    st.integers(0, 12),
)
def test_posterior_adjust_keeps_ratios(x, r1, r2):
    cs = make_structure(3, [0b011, 0b100], [HALF, HALF])
    y = posterior_adjust(x, {0b011: r1, 0b100: r2}, cs)
    assert y[0] + y[1] == r1 and y[2] == r2
    if x[0] + x[1] > 0:
        assert y[0] * x[1] == y[1] * x[0]


# -- quantile-preference games -------------------------------------------------


@pytest.fixture
def sg_d010(d010):
    return make_stochastic_game(
        2, {1: {"a": point_mass(0)}, 2: {"a": point_mass(0)}, 3: {"a": d010}}, [HALF, HALF]
    )


def test_quantile_game_examples(sg_d010, d24, d010):
    assert quantile_game(sg_d010).worth == (0, 0, 0, 10)
    two = make_stochastic_game(
        2, {1: {"a": point_mass(0)}, 2: {"a": point_mass(0)}, 3: {"x": d24, "y": d010}}, [HALF, HALF]
    )
    assert quantile_game(two)(3) == 10
    det = make_stochastic_game(3, _deterministic(G_ADD), [HALF] * 3)
    assert quantile_game(det) == G_ADD


def test_sb_balanced_examples(sg_d010):
    assert sb_is_balanced(make_stochastic_game(3, _deterministic(G_ADD), [HALF] * 3))
    assert not sb_is_balanced(make_stochastic_game(3, _deterministic(G_PAIR), [HALF] * 3))
    assert sb_is_balanced(sg_d010)


def test_sb_core_examples(sg_d010):
    alloc = make_sb_allocation(sg_d010, [F(5, 2), F(5, 2)], [HALF, HALF], "a")
    assert sb_payoffs(sg_d010, alloc) == (5, 5)
    assert sb_core_contains(sg_d010, alloc)
    assert sb_core_contains(sg_d010, make_sb_allocation(sg_d010, [5, 0], [1, 0], "a"))
    pair = make_stochastic_game(3, _deterministic(G_PAIR), [HALF] * 3)
    assert sb_find_core_allocation(pair) is None
    assert not sb_core_contains(pair, make_sb_allocation(pair, [F(1, 3)] * 3, [1, 0, 0], "a"))


def test_sb_allocation_validation(sg_d010):
    with pytest.raises(InputError):
        make_sb_allocation(sg_d010, [1, 1], [HALF, HALF], "a")
    with pytest.raises(InputError):
        make_sb_allocation(sg_d010, [5, 0], [F(3, 2), -HALF], "a")
    with pytest.raises(InputError):
        make_sb_allocation(sg_d010, [5, 0], [1, 0], "b")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_found_sb_allocations_are_in_core(seed):
    sg = random_stochastic_game(random.Random(seed), 3)
    alloc = sb_find_core_allocation(sg)
    if alloc is not None:
        assert sb_core_contains(sg, make_sb_allocation(sg, alloc.d, alloc.r, alloc.action))


def test_point_mass_budget_is_grand_worth():
    g = G_ADD
    cg = point_mass_chance_game(g)
    assert budgets(cg, grand_structure(3, HALF)) == (6,)


def test_prior_nucleolus_beats_random_budget_points():
    rng = random.Random(21)
    for _ in range(5):
        cg = random_chance_game(rng, 3)
        cs = grand_structure(3, HALF)
        res = prior_nucleolus(cg, cs)
        assert prior_budget_check(cg, res.point, cs)
        (q,) = budgets(cg, cs)
        for _ in range(200):
            cuts = sorted(F(rng.randint(0, 40), 40) * q for _ in range(2))
            x = (cuts[0], cuts[1] - cuts[0], q - cuts[1])
            assert lex_compare(res.excess, probabilistic_excess_profile(cg, x)) <= 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 11))
def test_fosd_implies_quantile_preference(seed, k):
    from ucg.generators import random_distribution
    from ucg.uncertainty import fosd_dominates, quantile

    rng = random.Random(seed)
    x, y = random_distribution(rng), random_distribution(rng)
    alpha = F(k, 12)
    if fosd_dominates(x, y):
        assert quantile(x, alpha, "right") >= quantile(y, alpha, "right")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_sb_deterministic_collapse(seed):
    from ucg.generators import random_game, random_payoff
    from ucg.tu import core_contains

    rng = random.Random(seed)
    g = random_game(rng, 3, 0, 6)
    sg = make_stochastic_game(3, _deterministic(g), [F(rng.randint(1, 3), 4) for _ in range(3)])
    assert quantile_game(sg) == g
    d = random_payoff(rng, 3, g(7))
    r = [F(1, 2), F(1, 2), 0]
    alloc = make_sb_allocation(sg, d, r, "a")
    assert sb_core_contains(sg, alloc) == core_contains(g, d)
