import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucg.bel import (
    Contract,
    Tristate,
    bargaining_set_contains,
    blocks,
    contract_check,
    core_basis,
    counterblocks,
    ex_ante_core_conditions,
    ex_ante_core_contains,
    ex_ante_excess,
    ex_ante_excess_profile,
    ex_ante_prenucleolus,
    ex_post_core_contains,
    expected_game,
    expected_payoffs,
    find_blocking,
    grand_contract,
    is_ex_ante_convex,
    legitimate_block,
    make_bel_game,
    make_contract,
    marginal_contract,
    prefers,
    pseudo_vertex,
)
from ucg.errors import CapabilityError, InputError
from ucg.generators import (
    convex_belief_bel_game,
    random_bel_game,
    random_belief,
    random_efficient_contract,
)
from ucg.tu import G_PAIR, core_contains, make_game, marginal_vector, prenucleolus
from ucg.uncertainty import choquet, make_belief, probability

HALF = F(1, 2)


def test_contract_checks(b_game, c_sym):
    assert contract_check(b_game, c_sym).feasible and contract_check(b_game, c_sym).efficient
    zero = grand_contract(b_game, [[0, 0], [0, 0]])
    assert contract_check(b_game, zero).feasible and not contract_check(b_game, zero).efficient
    over = grand_contract(b_game, [[3, 0], [0, 0]])
    assert not contract_check(b_game, over).feasible
    with pytest.raises(InputError):
        grand_contract(b_game, [[1, 1]])


def test_contract_algebra(c_sym):
    assert c_sym.column(0) == (1, 2)
    assert c_sym.restrict(0b10).rows == ((1,), (2,))
    assert (c_sym + c_sym).rows == c_sym.scale(2).rows


def test_preferences(bel1, b_game_bel1, b_game):
    assert prefers(b_game, 0, [1, 2], [1, 2]) and not prefers(b_game, 0, [1, 2], [1, 2], strict=True)
    assert prefers(b_game_bel1, 0, [10, 0], [0, 10], strict=True)
    assert prefers(b_game, 0, [2, 4], [4, 2]) and prefers(b_game, 0, [4, 2], [2, 4])
    assert not prefers(b_game, 0, [2, 4], [4, 2], strict=True)


def test_blocking_examples(b_game, c_sym, b3):
    assert not blocks(b_game, c_sym, c_sym)
    assert not blocks(b_game, make_contract(b_game, 0b01, [[0], [0]]), c_sym)
    c_n = grand_contract(b3, [[F(1, 3)] * 3, [F(2, 3)] * 3])
    assert expected_payoffs(b3, c_n) == (HALF, HALF, HALF)
    witness = make_contract(b3, 0b011, [[F(9, 20), F(9, 20)], [F(19, 20), F(19, 20)]])
    assert blocks(b3, witness, c_n)
    with pytest.raises(InputError, match="not feasible"):
        blocks(b3, make_contract(b3, 0b011, [[1, 1], [1, 1]]), c_n)


def test_ex_ante_core_examples(b_game, c_sym):
    assert ex_ante_core_contains(b_game, c_sym) is Tristate.YES
    assert ex_ante_core_contains(b_game, grand_contract(b_game, [[2, 0], [4, 0]])) is Tristate.YES


def test_belief_necessary_condition_fails():
    nu = make_belief(2, {0b01: F(3, 10), 0b11: F(7, 10)})
    games = [make_game(2, [0, 2, 0, 2]), make_game(2, [0, 2, 0, 4])]
    bg = make_bel_game(nu, games)
    c = grand_contract(bg, [[0, 2], [1, 3]])
    conds = {k.coalition: k for k in ex_ante_core_conditions(bg, c)}
    # C_nu(v({1})) = 2 while the plausibility value of c_1 is at most 1
    assert not conds[0b01].necessary
    assert ex_ante_core_contains(bg, c) is Tristate.NO


def test_bel1_tristate_and_exact(b_game_bel1):
    c = grand_contract(b_game_bel1, [[2, 0], [0, 4]])
    assert ex_ante_core_contains(b_game_bel1, c) is Tristate.UNDETERMINED
    assert ex_ante_core_contains(b_game_bel1, c, exact=True) is Tristate.NO
    witness = find_blocking(b_game_bel1, c)
    assert witness.coalition == 0b11
    assert blocks(b_game_bel1, witness, c)


def test_ex_post_examples(b_game, c_sym):
    assert ex_post_core_contains(b_game, "w2", [2, 2])
    assert not ex_post_core_contains(b_game, "w1", [2, 2])
    assert ex_post_core_contains(b_game, contract=c_sym, mode="ieong_shoham")
    with pytest.raises(InputError):
        ex_post_core_contains(b_game, mode="other")


def test_expected_game_examples(b_game, b3, b_game_bel1):
    assert expected_game(b_game).worth == (0, 0, 0, 3)
    assert expected_game(b3) == G_PAIR.scale(F(3, 2))
    same = make_bel_game(probability(2, [F(1, 4), F(3, 4)]), [G_PAIR, G_PAIR])
    assert expected_game(same) == G_PAIR
    with pytest.raises(CapabilityError):
        expected_game(b_game_bel1)


def test_core_basis_and_pseudo_vertex(b_game):
    basis = core_basis(b_game)
    assert len(basis) == 1
    assert basis[0].rows == ((-1, 1), (1, -1))
    assert pseudo_vertex(b_game, [F(3, 2), F(3, 2)]).rows == ((1, 1), (2, 2))
    with pytest.raises(InputError):
        pseudo_vertex(b_game, [1, 1])


def test_pseudo_vertex_on_identical_worlds():
    bg = make_bel_game(probability(2, [F(1, 3), F(2, 3)]), [G_PAIR.scale(3)] * 2)
    y = (1, 1, 1)
    assert pseudo_vertex(bg, y).rows == (y, y)


def test_basis_dimension_formula():
    pi = probability(3, [F(1, 6), F(1, 3), HALF])
    bg = make_bel_game(pi, [G_PAIR] * 3)
    assert len(core_basis(bg)) == (3 - 1) * (3 - 1)


def test_convexity_examples(b_game, b3):
    assert is_ex_ante_convex(b_game)
    assert not is_ex_ante_convex(b3)


def test_convexity_requires_common_prior(b_game):
    other = make_bel_game(
        [probability(2, [HALF, HALF]), probability(2, [F(1, 4), F(3, 4)])], list(b_game.games)
    )
    with pytest.raises(InputError):
        is_ex_ante_convex(other)


def test_marginal_contract_examples(b_game):
    assert marginal_contract(b_game, (0, 1)).rows == ((0, 2), (0, 4))
    bg = make_bel_game(probability(2, [HALF, HALF]), [G_PAIR, G_PAIR])
    m = marginal_vector(G_PAIR, (2, 0, 1))
    assert marginal_contract(bg, (2, 0, 1)).rows == (m, m)


def test_excess_examples(b_game, c_sym):
    assert ex_ante_excess(b_game, 0b01, c_sym) == F(-3, 2)
    assert ex_ante_excess(b_game, 0b11, c_sym) == 0
    bg = make_bel_game(probability(2, [HALF, HALF]), [G_PAIR, G_PAIR])
    x = (F(1, 3), F(1, 3), F(1, 3))
    c = grand_contract(bg, [x, x])
    assert ex_ante_excess(bg, 0b011, c) == F(1, 3)
    assert ex_ante_excess_profile(bg, c)[0] == F(1, 3)


def test_prenucleolus_examples(b_game, b3):
    rep, fiber = ex_ante_prenucleolus(b_game)
    assert rep.rows == ((1, 1), (2, 2))
    assert fiber.dimension == 1
    rep3, fiber3 = ex_ante_prenucleolus(b3)
    assert fiber3.target == (HALF, HALF, HALF)
    assert expected_payoffs(b3, rep3) == (HALF, HALF, HALF)
    same = make_bel_game(probability(2, [HALF, HALF]), [G_PAIR, G_PAIR])
    x = prenucleolus(G_PAIR)
    assert ex_ante_prenucleolus(same)[0].rows == (x, x)


def test_counterblock_examples(b3):
    c_n = grand_contract(b3, [[F(1, 3)] * 3, [F(2, 3)] * 3])
    # expectations 7/10 each
    c_s = make_contract(b3, 0b011, [[F(9, 20), F(9, 20)], [F(19, 20), F(19, 20)]])
    assert not counterblocks(b3, c_s, c_s, c_n)
    # expectations (3/4, 3/5) for players 1 and 3
    alt = make_contract(b3, 0b101, [[HALF, F(7, 20)], [1, F(17, 20)]])
    assert counterblocks(b3, alt, c_s, c_n)


def test_b3_bargaining_member_outside_empty_core(b3):
    c_n = grand_contract(b3, [[F(1, 3)] * 3, [F(2, 3)] * 3])
    assert ex_ante_core_contains(b3, c_n) is Tristate.NO
    assert bargaining_set_contains(b3, c_n) is Tristate.YES
    assert bargaining_set_contains(b3, c_n, strong=True) is Tristate.YES


def test_core_contracts_are_in_bargaining_sets(b_game, c_sym):
    assert bargaining_set_contains(b_game, c_sym) is Tristate.YES
    assert bargaining_set_contains(b_game, c_sym, strong=True) is Tristate.YES


def test_legitimate_block_is_verified():
    # player 1 gets nothing although v({1}) = 2 in both worlds
    games = [make_game(2, [0, 2, 0, 3]), make_game(2, [0, 2, 0, 3])]
    bg = make_bel_game(probability(2, [HALF, HALF]), games)
    c = grand_contract(bg, [[0, 3], [0, 3]])
    block = legitimate_block(bg, c)
    assert block is not None and block.coalition == 0b01 and block.margin > 0
    assert bargaining_set_contains(bg, c) is Tristate.NO


def test_heterogeneous_bargaining_is_undetermined_or_yes(b_game_bel1):
    c = grand_contract(b_game_bel1, [[2, 0], [0, 4]])
    assert bargaining_set_contains(b_game_bel1, c) is Tristate.UNDETERMINED


# -- properties ---------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_exact_mode_agrees_with_decided_verdicts(seed):
    rng = random.Random(seed)
    prior = random_belief(rng, 2)
    bg = random_bel_game(rng, 2, 2, prior)
    c = random_efficient_contract(rng, bg)
    if not contract_check(bg, c).feasible:
        return
    fast = ex_ante_core_contains(bg, c)
    exact = ex_ante_core_contains(bg, c, exact=True)
    if fast is not Tristate.UNDETERMINED:
        assert exact is fast
    witness = find_blocking(bg, c)
    assert (witness is None) == (exact is Tristate.YES)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_probability_core_matches_blocking_search(seed):
    rng = random.Random(seed)
    pi = probability(2, [F(1, 3), F(2, 3)])
    bg = random_bel_game(rng, 3, 2, pi)
    c = random_efficient_contract(rng, bg)
    verdict = ex_ante_core_contains(bg, c)
    assert (verdict is Tristate.YES) == (find_blocking(bg, c) is None)
    assert (verdict is Tristate.YES) == core_contains(expected_game(bg), expected_payoffs(bg, c))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_choquet_value_of_contract_column(seed, x):
    rng = random.Random(seed)
    prior = random_belief(rng, 2)
    bg = make_bel_game(prior, [make_game(2, [0, 0, 0, 1])] * 2)
    assert choquet(bg.priors[0], x) <= choquet(bg.priors[0].plausibility(), x)


def test_yes_contracts_satisfy_necessary_condition():
    rng = random.Random(41)
    for k in range(40):
        d = 2
        priors = [random_belief(rng, d) for _ in range(2)] if k % 2 else random_belief(rng, d)
        games = [make_game(2, [0, rng.randint(0, 2), rng.randint(0, 2), rng.randint(2, 5)]) for _ in range(d)]
        bg = make_bel_game(priors, games)
        c = random_efficient_contract(rng, bg)
        if ex_ante_core_contains(bg, c, exact=True) is Tristate.YES:
            assert all(cond.necessary for cond in ex_ante_core_conditions(bg, c))


def test_sufficient_condition_is_sound_against_random_witnesses():
    rng = random.Random(42)
    checked = 0
    for _ in range(3):
        bg = convex_belief_bel_game(rng, 2, 2)
        c = marginal_contract(bg, (0, 1))
        conds = ex_ante_core_conditions(bg, c)
        if not all(cond.sufficient for cond in conds):
            continue
        checked += 1
        for s in (0b01, 0b10, 0b11):
            k = bin(s).count("1")
            for _ in range(10_000):
                rows = []
                for g in bg.games:
                    head = [F(rng.randint(-8, 8), 4) for _ in range(k - 1)]
                    rows.append(tuple(head) + (g(s) - sum(head, F(0)) - F(rng.randint(0, 2), 4),))
                assert not blocks(bg, Contract(s, tuple(rows)), c)
    assert checked > 0


def test_basis_is_linearly_independent():
    from ucg.lp import Span

    pi = probability(3, [F(1, 6), F(1, 3), HALF])
    bg = make_bel_game(pi, [G_PAIR] * 3)
    span = Span(9)
    for b in core_basis(bg):
        assert span.add([v for row in b.rows for v in row])
        for i in range(3):
            assert sum(p * row[i] for p, row in zip(pi.probabilities(), b.rows)) == 0
        assert all(sum(row) == 0 for row in b.rows)


def test_fiber_has_constant_excess(b3):
    rep, fiber = ex_ante_prenucleolus(b3)
    profile = ex_ante_excess_profile(b3, rep)
    for a in range(-2, 3):
        for b in range(-2, 3):
            c = rep + fiber.directions[0].scale(a) + fiber.directions[1].scale(b)
            assert ex_ante_excess_profile(b3, c) == profile


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_single_world_collapse(seed):
    from ucg.generators import random_payoff
    from ucg.tu import classify_game, excess

    rng = random.Random(seed)
    g = make_game(3, [0] + [rng.randint(-2, 5) for _ in range(7)])
    bg = make_bel_game(probability(1, [1]), [g])
    x = random_payoff(rng, 3, g(7))
    c = grand_contract(bg, [x])
    assert (ex_ante_core_contains(bg, c) is Tristate.YES) == core_contains(g, x)
    assert ex_ante_prenucleolus(bg)[0].rows == (prenucleolus(g),)
    assert marginal_contract(bg, (1, 2, 0)).rows == (marginal_vector(g, (1, 2, 0)),)
    assert is_ex_ante_convex(bg) == classify_game(g)["convex"]
    assert all(ex_ante_excess(bg, s, c) == excess(g, s, x) for s in range(1, 8))
    assert expected_game(bg) == g
