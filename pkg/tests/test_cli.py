import json
from fractions import Fraction as F

import pytest

from ucg.bel import Contract, blocks, grand_contract
from ucg.cli import main, run_command
from ucg.gamefile import parse_game_file
from ucg.report import EXIT_CODES
from ucg.tu import BalancedCollection, core_contains, mask_of


def run(fixtures, *argv):
    args = list(argv)
    args[2] = str(fixtures / args[2])
    return run_command(args)


def machine(fixtures, *argv):
    out = run(fixtures, *argv, "--format", "machine")
    return out, json.loads(out.output())


def test_core_check_certificate(fixtures):
    out = run(fixtures, "tu", "core-check", "g_pair.json", "--payoff", "1/3,1/3,1/3")
    assert out.exit_code == 1
    assert "excess({1,2}) = 1/3" in out.output().decode()


def test_core_empty_certificate(fixtures):
    out = run(fixtures, "tu", "core-empty", "g_pair.json")
    assert out.exit_code == 0
    text = out.output().decode()
    assert "λ = 1/2, 1/2, 1/2" in text
    assert "{1,2}" in text and "{1,3}" in text and "{2,3}" in text


def test_core_empty_certificate_reverifies(fixtures):
    _, doc = machine(fixtures, "tu", "core-empty", "g_pair.json")
    g = parse_game_file(fixtures / "g_pair.json").game
    res = doc["result"]
    coll = BalancedCollection(
        3,
        tuple(mask_of(i - 1 for i in c) for c in res["collection"]),
        tuple(F(w) for w in res["weights"]),
    )
    assert coll.is_balancing()
    assert coll.weighted_worth(g) == F(res["weighted_worth"]) > g(g.grand)


def test_core_point_reverifies(fixtures):
    out, doc = machine(fixtures, "tu", "core-empty", "g_conv.json")
    assert out.exit_code == 1
    g = parse_game_file(fixtures / "g_conv.json").game
    assert core_contains(g, [F(v) for v in doc["result"]["core_point"]])


def test_bel_undetermined_then_exact(fixtures):
    out = run(fixtures, "bel", "core-check", "b_game_bel1.json", "--contract", "2,0;0,4")
    assert out.exit_code == 3
    text = out.output().decode()
    assert "necessary condition" in text and "sufficient condition" in text
    out, doc = machine(fixtures, "bel", "core-check", "b_game_bel1.json", "--contract", "2,0;0,4", "--exact")
    assert out.exit_code == 1
    bg = parse_game_file(fixtures / "b_game_bel1.json").game
    block = doc["result"]["blocking"]
    witness = Contract(
        mask_of(i - 1 for i in block["coalition"]),
        tuple(tuple(F(v) for v in row) for row in block["rows"]),
    )
    assert blocks(bg, witness, grand_contract(bg, [[2, 0], [0, 4]]))


@pytest.mark.parametrize(
    "argv, code",
    [
        (("tu", "core-check", "g_add.json", "--payoff", "1,2,3"), 0),
        (("tu", "nucleolus", "g_pair.json"), 0),
        (("tu", "balanced", "g_pair.json"), 1),
        (("tu", "balanced", "g_conv.json"), 0),
        (("tu", "marginal", "g_conv.json", "--permutation", "1,2,3"), 0),
        (("chance", "budget", "cg1.json", "--payoff", "1,1"), 0),
        (("chance", "budget", "cg1.json", "--payoff", "2,1"), 1),
        (("chance", "excess", "cg1.json", "--payoff", "1,1", "--coalition", "1,2"), 0),
        (("chance", "prior-nucleolus", "cg1.json"), 0),
        (("chance", "adjust", "cg1.json", "--payoff", "1,2", "--realized", "6"), 0),
        (("sb", "balanced", "sb_d010.json"), 0),
        (("sb", "core-check", "sb_d010.json", "--payoff", "5/2,5/2", "--shares", "1/2,1/2", "--action", "a"), 0),
        (("pair", "undominated", "pair_gpair.json", "--payoff", "1/3,1/3,1/3", "--payoff2", "1/3,1/3,1/3"), 0),
        (("pair", "stable", "pair_gpair.json", "--payoff", "1,0,0", "--payoff2", "0,0,1"), 1),
        (("tuu", "wsc-check", "t1.json", "--allocation", "1,1;1,3"), 0),
        (("tuu", "wsc-check", "t1.json", "--allocation", "3,-1;1,3"), 1),
        (("bel", "core-check", "b_game.json", "--contract", "1,1;2,2"), 0),
        (("bel", "expost", "b_game.json", "--world", "w2", "--payoff", "2,2"), 0),
        (("bel", "expost", "b_game.json", "--world", "w1", "--payoff", "2,2"), 1),
        (("bel", "expost", "b_game.json", "--contract", "1,1;2,2", "--mode", "ieong_shoham"), 0),
        (("bel", "expected", "b_game.json"), 0),
        (("bel", "expected", "b_game_bel1.json"), 2),
        (("bel", "basis", "b_game.json"), 0),
        (("bel", "convex", "b_game.json"), 0),
        (("bel", "convex", "b3.json"), 1),
        (("bel", "marginal", "b_game.json", "--permutation", "1,2"), 0),
        (("bel", "nucleolus", "b3.json"), 0),
        (("bel", "bargaining", "b3.json", "--contract", "1/3,1/3,1/3;2/3,2/3,2/3"), 0),
        (("bel", "bargaining", "b3.json", "--contract", "1/3,1/3,1/3;2/3,2/3,2/3", "--strong"), 0),
        (("bel", "core-check", "b3.json", "--contract", "1/3,1/3,1/3;2/3,2/3,2/3"), 1),
        (("tu", "core-check", "bad_rational.json", "--payoff", "0,0,1"), 2),
        (("bel", "convex", "bad_mass.json"), 2),
        (("tu", "core-check", "g_pair.json", "--payoff", "1/2,1/2"), 2),
        (("tu", "core-check", "g_pair.json", "--payoff", "0.5,0.5,0"), 2),
        (("tu", "core-check", "cg1.json", "--payoff", "1,1"), 2),
    ],
)
def test_exit_codes(fixtures, argv, code):
    text = run(fixtures, *argv)
    assert text.exit_code == code
    mach = run(fixtures, *argv, "--format", "machine")
    assert mach.exit_code == code
    if mach.report is not None:
        assert json.loads(mach.output())["exit_code"] == code


def test_exit_code_is_function_of_verdict():
    assert EXIT_CODES == {"holds": 0, "computed": 0, "yes": 0, "fails": 1, "no": 1, "undetermined": 3}


def test_unknown_flag_gives_usage(fixtures, capsys):
    code = main(["tu", "core-check", str(fixtures / "g_pair.json"), "--bogus", "1"])
    assert code == 2
    assert "usage:" in capsys.readouterr().err


def test_input_error_message(fixtures, capsys):
    assert main(["bel", "convex", str(fixtures / "bad_mass.json")]) == 2
    assert "mass sum ≠ 1 (got 9/10)" in capsys.readouterr().err


def test_machine_output_byte_stable(fixtures):
    argv = ("bel", "nucleolus", "b3.json")
    first = run(fixtures, *argv, "--format", "machine").output()
    second = run(fixtures, *argv, "--format", "machine").output()
    assert first == second
    doc = json.loads(first)
    assert list(doc) == sorted(doc)
    assert "timing_seconds" not in doc


def test_timing_flag(fixtures):
    out = run(fixtures, "tu", "nucleolus", "g_pair.json", "--timing")
    assert out.output().decode().rstrip().splitlines()[-1].startswith("time: ")
    _, doc = machine(fixtures, "tu", "nucleolus", "g_pair.json", "--timing")
    assert "timing_seconds" in doc


def test_nucleolus_value_in_machine_output(fixtures):
    _, doc = machine(fixtures, "tu", "nucleolus", "g_pair.json")
    assert doc["result"]["point"] == ["1/3", "1/3", "1/3"]


def test_prior_nucleolus_trace(fixtures):
    _, doc = machine(fixtures, "chance", "prior-nucleolus", "cg1.json")
    assert doc["result"]["point"] == ["1", "1"]
    assert doc["result"]["trace"][0] == {"coalitions": [[1, 2]], "level": "1/2"}


def test_main_writes_stdout(fixtures, capsys):
    assert main(["tu", "nucleolus", str(fixtures / "g_add.json")]) == 0
    assert capsys.readouterr().out.startswith("tu nucleolus: computed")
