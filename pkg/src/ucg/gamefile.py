"""JSON game files.

One document format for every model, selected by the ``model`` tag::

    {"model": "tu", "players": 3,
     "worth": [{"coalition": [1, 2], "value": "1"}, ...]}

Rationals are JSON integers or ``"p/q"`` strings; decimals are refused.
Coalitions are arrays of 1-based player numbers. Coalitions missing from a
TU worth table are worth 0. See the README for the other models.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from .bel import BelGame, make_bel_game
from .chance import (
    ChanceGame,
    CoalitionStructure,
    StochasticGame,
    make_chance_game,
    make_stochastic_game,
    make_structure,
)
from .errors import InputError, UcgError
from .rational import fmt, to_rational
from .state import TUUGame, UncertainPair, make_tuu_game, make_uncertain_pair
from .tu import MAX_PLAYERS, Game, make_game, members
from .uncertainty import BeliefFunction, DiscreteDistribution, make_belief, make_distribution

MODELS = ("tu", "chance", "stochastic", "uncertain-pair", "tuu", "bel")


@dataclass(frozen=True)
class GameFile:
    model: str
    game: Any
    structure: Optional[CoalitionStructure] = None  # chance files only


# ---------------------------------------------------------------------------
# reading


def _rational(value: Any, field: str):
    if isinstance(value, float):
        raise InputError(f"{field}: decimals are not accepted, write a 'p/q' string")
    if isinstance(value, (int, str)) and not isinstance(value, bool):
        return to_rational(value, field)
    raise InputError(f"{field}: expected an integer or 'p/q' string")


def _get(obj: dict, key: str, field: str) -> Any:
    if not isinstance(obj, dict):
        raise InputError(f"{field}: expected an object")
    if key not in obj:
        raise InputError(f"{field}: missing key {key!r}")
    return obj[key]


def _list(value: Any, field: str) -> list:
    if not isinstance(value, list):
        raise InputError(f"{field}: expected an array")
    return value


def _players(doc: dict) -> int:
    n = _get(doc, "players", "file")
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= MAX_PLAYERS:
        raise InputError(f"players: expected an integer in 1..{MAX_PLAYERS}")
    return n


def _coalition(value: Any, n: int, field: str, allow_empty: bool = False) -> int:
    items = _list(value, field)
    mask = 0
    for k, p in enumerate(items):
        if not isinstance(p, int) or isinstance(p, bool) or not 1 <= p <= n:
            raise InputError(f"{field}[{k}]: player must be an integer in 1..{n}")
        if mask >> (p - 1) & 1:
            raise InputError(f"{field}: player {p} listed twice")
        mask |= 1 << (p - 1)
    if mask == 0 and not allow_empty:
        raise InputError(f"{field}: coalition is empty")
    return mask


def _worth_table(value: Any, n: int, field: str) -> Game:
    table = {}
    for k, entry in enumerate(_list(value, field)):
        where = f"{field}[{k}]"
        mask = _coalition(_get(entry, "coalition", where), n, f"{where}.coalition", allow_empty=True)
        if mask in table:
            raise InputError(f"{where}: coalition listed twice")
        table[mask] = _rational(_get(entry, "value", where), f"{where}.value")
    for m in range(1 << n):
        table.setdefault(m, 0)
    return make_game(n, table)


def _distribution(value: Any, field: str) -> DiscreteDistribution:
    atoms = []
    for k, atom in enumerate(_list(value, field)):
        where = f"{field}[{k}]"
        atoms.append(
            (
                _rational(_get(atom, "value", where), f"{where}.value"),
                _rational(_get(atom, "mass", where), f"{where}.mass"),
            )
        )
    try:
        return make_distribution(atoms)
    except InputError as exc:
        raise InputError(f"{field}: {exc}") from None


def _structure(value: Any, n: int) -> CoalitionStructure:
    blocks = [
        _coalition(b, n, f"structure.blocks[{k}]")
        for k, b in enumerate(_list(_get(value, "blocks", "structure"), "structure.blocks"))
    ]
    fractiles = [
        _rational(a, f"structure.fractiles[{k}]")
        for k, a in enumerate(_list(_get(value, "fractiles", "structure"), "structure.fractiles"))
    ]
    return make_structure(n, blocks, fractiles)


def _mass(value: Any, worlds: list[str], field: str) -> BeliefFunction:
    table = {}
    for k, entry in enumerate(_list(value, field)):
        where = f"{field}[{k}]"
        labels = _list(_get(entry, "worlds", where), f"{where}.worlds")
        mask = 0
        for lab in labels:
            if lab not in worlds:
                raise InputError(f"{where}.worlds: unknown world {lab!r}")
            mask |= 1 << worlds.index(lab)
        if mask in table:
            raise InputError(f"{where}: focal set listed twice")
        table[mask] = _rational(_get(entry, "value", where), f"{where}.value")
    try:
        return make_belief(worlds, table)
    except InputError as exc:
        raise InputError(f"{field}: {exc}") from None


def _labels(items: list, field: str) -> list[str]:
    out = []
    for k, item in enumerate(items):
        lab = _get(item, "label", f"{field}[{k}]")
        if not isinstance(lab, str) or not lab:
            raise InputError(f"{field}[{k}].label: expected a nonempty string")
        if lab in out:
            raise InputError(f"{field}[{k}].label: duplicate label {lab!r}")
        out.append(lab)
    return out


def from_document(doc: Any) -> GameFile:
    if not isinstance(doc, dict):
        raise InputError("file: expected a JSON object at top level")
    model = _get(doc, "model", "file")
    if model not in MODELS:
        raise InputError(f"model: unknown model tag {model!r} (expected one of {', '.join(MODELS)})")
    n = _players(doc)
    if model == "tu":
        return GameFile(model, _worth_table(_get(doc, "worth", "file"), n, "worth"))
    if model == "chance":
        table = {}
        for k, entry in enumerate(_list(_get(doc, "distributions", "file"), "distributions")):
            where = f"distributions[{k}]"
            mask = _coalition(_get(entry, "coalition", where), n, f"{where}.coalition")
            if mask in table:
                raise InputError(f"{where}: coalition listed twice")
            table[mask] = _distribution(_get(entry, "atoms", where), f"{where}.atoms")
        cs = _structure(doc["structure"], n) if "structure" in doc else None
        return GameFile(model, make_chance_game(n, table), cs)
    if model == "stochastic":
        alphas = [_rational(a, f"alphas[{k}]") for k, a in enumerate(_list(_get(doc, "alphas", "file"), "alphas"))]
        actions: dict[int, dict[str, DiscreteDistribution]] = {}
        for k, entry in enumerate(_list(_get(doc, "actions", "file"), "actions")):
            where = f"actions[{k}]"
            mask = _coalition(_get(entry, "coalition", where), n, f"{where}.coalition")
            name = _get(entry, "action", where)
            if not isinstance(name, str) or not name:
                raise InputError(f"{where}.action: expected a nonempty string")
            bucket = actions.setdefault(mask, {})
            if name in bucket:
                raise InputError(f"{where}: action {name!r} listed twice")
            bucket[name] = _distribution(_get(entry, "atoms", where), f"{where}.atoms")
        return GameFile(model, make_stochastic_game(n, actions, alphas))
    if model == "uncertain-pair":
        w = _worth_table(_get(doc, "w", "file"), n, "w")
        w2 = _worth_table(_get(doc, "w2", "file"), n, "w2")
        family = None
        if "family" in doc:
            family = [_coalition(c, n, f"family[{k}]") for k, c in enumerate(_list(doc["family"], "family"))]
        return GameFile(model, make_uncertain_pair(w, w2, family))
    if model == "tuu":
        states = _list(_get(doc, "states", "file"), "states")
        labels = _labels(states, "states")
        games, slopes = [], []
        for k, st in enumerate(states):
            games.append(_worth_table(_get(st, "worth", f"states[{k}]"), n, f"states[{k}].worth"))
            if "slopes" in st:
                row = _list(st["slopes"], f"states[{k}].slopes")
                slopes.append([_rational(v, f"states[{k}].slopes[{j}]") for j, v in enumerate(row)])
            else:
                slopes.append([1] * n)
        return GameFile(model, make_tuu_game(labels, games, slopes))
    # bel
    worlds = _list(_get(doc, "worlds", "file"), "worlds")
    labels = _labels(worlds, "worlds")
    games = [_worth_table(_get(w, "worth", f"worlds[{k}]"), n, f"worlds[{k}].worth") for k, w in enumerate(worlds)]
    if "prior" in doc and "priors" in doc:
        raise InputError("file: give either 'prior' or 'priors', not both")
    if "prior" in doc:
        priors: Union[BeliefFunction, list[BeliefFunction]] = _mass(
            _get(doc["prior"], "mass", "prior"), labels, "prior.mass"
        )
    else:
        plist = _list(_get(doc, "priors", "file"), "priors")
        priors = [_mass(_get(p, "mass", f"priors[{k}]"), labels, f"priors[{k}].mass") for k, p in enumerate(plist)]
    return GameFile(model, make_bel_game(priors, games))


def loads(text: str) -> GameFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_document(doc)


def parse_game_file(path: Union[str, Path]) -> GameFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return loads(text)
    except UcgError as exc:
        raise type(exc)(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# writing


def _coal(mask: int) -> list[int]:
    return [i + 1 for i in members(mask)]


def _worth_doc(g: Game) -> list[dict]:
    return [{"coalition": _coal(m), "value": fmt(g(m))} for m in range(1, g.grand + 1)]


def _dist_doc(dist: DiscreteDistribution) -> list[dict]:
    return [{"value": fmt(v), "mass": fmt(p)} for v, p in dist.atoms]


def _mass_doc(b: BeliefFunction) -> list[dict]:
    return [
        {"worlds": [b.worlds[k] for k in range(b.d) if a >> k & 1], "value": fmt(m)}
        for a, m in enumerate(b.mass)
        if m
    ]


def to_document(gf: GameFile) -> dict:
    g = gf.game
    if gf.model == "tu":
        return {"model": "tu", "players": g.n, "worth": _worth_doc(g)}
    if gf.model == "chance":
        assert isinstance(g, ChanceGame)
        doc = {
            "model": "chance",
            "players": g.n,
            "distributions": [{"coalition": _coal(m), "atoms": _dist_doc(g(m))} for m in range(1, g.grand + 1)],
        }
        if gf.structure is not None:
            doc["structure"] = {
                "blocks": [_coal(b) for b in gf.structure.blocks],
                "fractiles": [fmt(a) for a in gf.structure.fractiles],
            }
        return doc
    if gf.model == "stochastic":
        assert isinstance(g, StochasticGame)
        acts = []
        for m in range(1, g.grand + 1):
            for name, dist in g.actions[m]:
                acts.append({"coalition": _coal(m), "action": name, "atoms": _dist_doc(dist)})
        return {"model": "stochastic", "players": g.n, "alphas": [fmt(a) for a in g.alphas], "actions": acts}
    if gf.model == "uncertain-pair":
        assert isinstance(g, UncertainPair)
        return {
            "model": "uncertain-pair",
            "players": g.n,
            "w": _worth_doc(g.w),
            "w2": _worth_doc(g.w2),
            "family": [_coal(m) for m in g.family],
        }
    if gf.model == "tuu":
        assert isinstance(g, TUUGame)
        states = [
            {"label": lab, "worth": _worth_doc(game), "slopes": [fmt(v) for v in row]}
            for lab, game, row in zip(g.states, g.games, g.slopes)
        ]
        return {"model": "tuu", "players": g.n, "states": states}
    assert isinstance(g, BelGame)
    doc = {
        "model": "bel",
        "players": g.n,
        "worlds": [{"label": lab, "worth": _worth_doc(game)} for lab, game in zip(g.worlds, g.games)],
    }
    if g.common:
        doc["prior"] = {"mass": _mass_doc(g.priors[0])}
    else:
        doc["priors"] = [{"mass": _mass_doc(p)} for p in g.priors]
    return doc


def dumps(gf: GameFile) -> str:
    return json.dumps(to_document(gf), indent=2, sort_keys=True) + "\n"


def dump_game_file(gf: GameFile, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(gf), encoding="utf-8")
