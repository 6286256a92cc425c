"""Shared fixtures and the acceptance summary hook."""

from __future__ import annotations

from fractions import Fraction as F
from pathlib import Path

import pytest

from ucg.bel import grand_contract, make_bel_game
from ucg.tu import G_ADD, G_CONV, G_PAIR, make_game
from ucg.uncertainty import make_belief, make_distribution, probability

FIXTURES = Path(__file__).parent / "fixtures"

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        previous = _RESULTS.get(number, (title, "PASS"))[1]
        status = "FAIL" if failed or previous == "FAIL" else "PASS"
        _RESULTS[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2} {status}  {title}")


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def g_pair():
    return G_PAIR


@pytest.fixture
def g_add():
    return G_ADD


@pytest.fixture
def g_conv():
    return G_CONV


@pytest.fixture
def d24():
    return make_distribution([(2, F(1, 2)), (4, F(1, 2))])


@pytest.fixture
def d010():
    return make_distribution([(0, F(1, 2)), (10, F(1, 2))])


@pytest.fixture
def bel1():
    return make_belief(2, {0b01: F(3, 10), 0b11: F(7, 10)})


def _two_world_games(n, grand1, grand2):
    table1 = [0] * (1 << n)
    table2 = [0] * (1 << n)
    table1[-1], table2[-1] = grand1, grand2
    return make_game(n, table1), make_game(n, table2)


@pytest.fixture
def b_game():
    return make_bel_game(probability(2, [F(1, 2), F(1, 2)]), list(_two_world_games(2, 2, 4)))


@pytest.fixture
def b3():
    return make_bel_game(probability(2, [F(1, 2), F(1, 2)]), [G_PAIR, G_PAIR.scale(2)])


@pytest.fixture
def b_game_bel1(bel1):
    return make_bel_game(bel1, list(_two_world_games(2, 2, 4)))


@pytest.fixture
def c_sym(b_game):
    """c_1 = (1,2) and c_2 = (1,2) across the two worlds."""
    return grand_contract(b_game, [[1, 1], [2, 2]])
