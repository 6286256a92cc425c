"""``ucg`` command-line front end.

Exit codes: 0 the property holds or a value was computed, 1 the property
fails (a certificate is printed), 2 bad input or usage, 3 undetermined.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import bel, chance, state, tu
from .errors import InputError, UcgError
from .gamefile import GameFile, parse_game_file
from .rational import fmt, to_rational
from .report import (
    EXIT_INPUT_ERROR,
    Report,
    coalition_list,
    format_report,
    game_table,
    table,
    vec,
)
from .tu import label

# ---------------------------------------------------------------------------
# flag parsing


def parse_vector(text: str, field: str) -> tuple[Fraction, ...]:
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise InputError(f"{field}: empty entry in {text!r}")
    return tuple(to_rational(p, f"{field}[{k}]") for k, p in enumerate(parts))


def parse_matrix(text: str, field: str) -> list[tuple[Fraction, ...]]:
    return [parse_vector(row, f"{field} row {k + 1}") for k, row in enumerate(text.split(";"))]


def parse_coalition(text: str, n: int, field: str = "--coalition") -> int:
    mask = 0
    for part in text.split(","):
        part = part.strip()
        try:
            p = int(part)
        except ValueError:
            raise InputError(f"{field}: {part!r} is not a player number") from None
        if not 1 <= p <= n:
            raise InputError(f"{field}: player {p} outside 1..{n}")
        mask |= 1 << (p - 1)
    return mask


def parse_blocks(text: str, n: int) -> list[int]:
    return [parse_coalition(b, n, "--structure") for b in text.split(";")]


def parse_permutation(text: str, n: int) -> tuple[int, ...]:
    try:
        order = tuple(int(p) - 1 for p in text.split(","))
    except ValueError:
        raise InputError(f"--permutation: expected comma-separated player numbers, got {text!r}") from None
    return tu.check_permutation(order, n)


def _require(value, flag: str):
    if value is None:
        raise InputError(f"{flag} is required for this command")
    return value


def _model(gf: GameFile, *models: str):
    if gf.model not in models:
        raise InputError(f"this command needs a {' or '.join(models)} file, got model {gf.model!r}")
    return gf.game


# ---------------------------------------------------------------------------
# tu


def cmd_tu_core_check(args, gf: GameFile) -> Report:
    g = _model(gf, "tu")
    x = tu.payoff(g, parse_vector(_require(args.payoff, "--payoff"), "--payoff"))
    violations = tu.core_violations(g, x)
    data = {"payoff": x, "efficient": tu.is_efficient(g, x)}
    lines = [f"payoff: {vec(x)}"]
    if not data["efficient"]:
        lines.append(f"not efficient: x(N) = {fmt(sum(x))}, v(N) = {fmt(g(g.grand))}")
    if tu.core_contains(g, x):
        return Report("tu core-check", "holds", data, lines)
    violations.sort(key=lambda mv: (-mv[1], mv[0]))
    data["violations"] = [{"coalition": coalition_list(m), "excess": e} for m, e in violations]
    lines.append("certificate:")
    lines += [f"  excess({label(m)}) = {fmt(e)}" for m, e in violations]
    return Report("tu core-check", "fails", data, lines)


def cmd_tu_core_empty(args, gf: GameFile) -> Report:
    g = _model(gf, "tu")
    res = tu.core_emptiness(g)
    if res.empty:
        col = res.collection
        data = {
            "collection": [coalition_list(m) for m in col.members],
            "weights": list(col.weights),
            "weighted_worth": col.weighted_worth(g),
            "grand_worth": g(g.grand),
        }
        lines = [
            "certificate: balanced collection with weighted worth above v(N)",
            "  collection: " + ", ".join(label(m) for m in col.members),
            "  λ = " + ", ".join(fmt(w) for w in col.weights),
            f"  Σ λ_S v(S) = {fmt(col.weighted_worth(g))} > v(N) = {fmt(g(g.grand))}",
        ]
        return Report("tu core-empty", "holds", data, lines)
    lines = ["certificate: core point", f"  x = {vec(res.core_point)}"]
    return Report("tu core-empty", "fails", {"core_point": res.core_point}, lines)


def cmd_tu_nucleolus(args, gf: GameFile) -> Report:
    g = _model(gf, "tu")
    x = tu.nucleolus(g, args.region)
    prof = tu.excess_profile(g, x)
    data = {"point": x, "region": args.region, "excess_profile": prof}
    lines = [f"region: {args.region}", f"point: {vec(x)}", f"excess profile: {vec(prof)}"]
    return Report("tu nucleolus", "computed", data, lines)


def cmd_tu_balanced(args, gf: GameFile) -> Report:
    g = _model(gf, "tu")
    bad = tu.balancedness_violation(g)
    if bad is None:
        n = len(tu.minimal_balanced_collections(g.n))
        return Report("tu balanced", "holds", {"collections_checked": n}, [f"minimal balanced collections checked: {n}"])
    data = {
        "collection": [coalition_list(m) for m in bad.members],
        "weights": list(bad.weights),
        "weighted_worth": bad.weighted_worth(g),
    }
    lines = [
        "certificate:",
        "  collection: " + ", ".join(label(m) for m in bad.members),
        "  λ = " + ", ".join(fmt(w) for w in bad.weights),
        f"  Σ λ_S v(S) = {fmt(bad.weighted_worth(g))} > v(N) = {fmt(g(g.grand))}",
    ]
    return Report("tu balanced", "fails", data, lines)


def cmd_tu_marginal(args, gf: GameFile) -> Report:
    g = _model(gf, "tu")
    order = parse_permutation(_require(args.permutation, "--permutation"), g.n)
    x = tu.marginal_vector(g, order)
    data = {"permutation": [i + 1 for i in order], "vector": x, "in_core": tu.core_contains(g, x)}
    lines = [f"order: {', '.join(str(i + 1) for i in order)}", f"marginal vector: {vec(x)}", f"in core: {'yes' if data['in_core'] else 'no'}"]
    return Report("tu marginal", "computed", data, lines)


# ---------------------------------------------------------------------------
# chance


def _structure(args, gf: GameFile) -> chance.CoalitionStructure:
    cg = gf.game
    if args.structure is None and args.alpha is None:
        if gf.structure is None:
            raise InputError("no coalition structure: pass --alpha (and optionally --structure) or add one to the file")
        return gf.structure
    blocks = parse_blocks(args.structure, cg.n) if args.structure else [cg.grand]
    if args.alpha is None:
        if gf.structure is not None and list(gf.structure.blocks) == blocks:
            return gf.structure
        raise InputError("--alpha is required with --structure")
    alphas = [to_rational(a.strip(), "--alpha") for a in args.alpha.split(";")]
    if len(alphas) == 1 and len(blocks) > 1:
        alphas = alphas * len(blocks)
    return chance.make_structure(cg.n, blocks, alphas)


def cmd_chance_budget(args, gf: GameFile) -> Report:
    cg = _model(gf, "chance")
    cs = _structure(args, gf)
    x = parse_vector(_require(args.payoff, "--payoff"), "--payoff")
    ok = chance.prior_budget_check(cg, x, cs)
    q = chance.budgets(cg, cs)
    rows = [(label(b), fmt(tu.coalition_sum(x, b)), fmt(t)) for b, t in zip(cs.blocks, q)]
    data = {
        "payoff": x,
        "blocks": [{"coalition": coalition_list(b), "promised": tu.coalition_sum(x, b), "budget": t} for b, t in zip(cs.blocks, q)],
    }
    lines = table([("block", "x(B)", "budget")] + rows)
    return Report("chance budget", "holds" if ok else "fails", data, lines)


def cmd_chance_excess(args, gf: GameFile) -> Report:
    cg = _model(gf, "chance")
    x = parse_vector(_require(args.payoff, "--payoff"), "--payoff")
    s = parse_coalition(_require(args.coalition, "--coalition"), cg.n)
    e = chance.probabilistic_excess(cg, s, x)
    data = {"coalition": coalition_list(s), "payoff": x, "excess": e}
    return Report("chance excess", "computed", data, [f"e({label(s)}, x) = {fmt(e)}"])


def cmd_chance_prior_nucleolus(args, gf: GameFile) -> Report:
    cg = _model(gf, "chance")
    cs = _structure(args, gf)
    res = chance.prior_nucleolus(cg, cs)
    trace = [{"level": st.level, "coalitions": [coalition_list(m) for m in st.fixed_rows]} for st in res.trace]
    data = {"point": res.point, "excess_profile": res.excess, "trace": trace, "unique": res.unique}
    lines = [f"point: {vec(res.point)}", f"excess profile: {vec(res.excess)}", "level trace:"]
    lines += table([(fmt(st.level), ", ".join(label(m) for m in st.fixed_rows)) for st in res.trace])
    if not res.unique:
        lines.append("note: the optimal set is not a single point; this is one representative")
    return Report("chance prior-nucleolus", "computed", data, lines)


def cmd_chance_adjust(args, gf: GameFile) -> Report:
    cg = _model(gf, "chance")
    cs = _structure(args, gf) if (args.alpha or args.structure or gf.structure) else chance.grand_structure(cg.n, Fraction(1, 2))
    x = parse_vector(_require(args.payoff, "--payoff"), "--payoff")
    realized = [to_rational(r.strip(), "--realized") for r in _require(args.realized, "--realized").split(";")]
    if len(realized) != len(cs.blocks):
        raise InputError(f"--realized needs one value per block ({len(cs.blocks)})")
    y = chance.posterior_adjust(x, dict(zip(cs.blocks, realized)), cs)
    data = {"payoff": x, "adjusted": y}
    return Report("chance adjust", "computed", data, [f"promised: {vec(x)}", f"adjusted: {vec(y)}"])


# ---------------------------------------------------------------------------
# quantile-preference games


def cmd_sb_balanced(args, gf: GameFile) -> Report:
    sg = _model(gf, "stochastic")
    w = chance.quantile_game(sg)
    bad = tu.balancedness_violation(w)
    data = {"quantile_game": {label(m): w(m) for m in range(1, w.grand + 1)}}
    lines = ["quantile game:"] + game_table(w)
    if bad is None:
        return Report("sb balanced", "holds", data, lines)
    data["collection"] = [coalition_list(m) for m in bad.members]
    data["weights"] = list(bad.weights)
    lines += [
        "certificate:",
        "  collection: " + ", ".join(label(m) for m in bad.members),
        "  λ = " + ", ".join(fmt(v) for v in bad.weights),
    ]
    return Report("sb balanced", "fails", data, lines)


def cmd_sb_core_check(args, gf: GameFile) -> Report:
    sg = _model(gf, "stochastic")
    d = parse_vector(_require(args.payoff, "--payoff"), "--payoff")
    r = parse_vector(_require(args.shares, "--shares"), "--shares")
    action = _require(args.action, "--action")
    alloc = chance.make_sb_allocation(sg, d, r, action)
    values = chance.sb_payoffs(sg, alloc)
    w = chance.quantile_game(sg)
    short = [(m, w(m) - tu.coalition_sum(values, m)) for m in range(1, sg.grand + 1)]
    short = [(m, e) for m, e in short if e > 0]
    data = {"quantile_payoffs": values}
    lines = [f"quantile payoffs: {vec(values)}"]
    if not short:
        return Report("sb core-check", "holds", data, lines)
    short.sort(key=lambda me: (-me[1], me[0]))
    data["violations"] = [{"coalition": coalition_list(m), "shortfall": e} for m, e in short]
    lines.append("certificate:")
    lines += [f"  w({label(m)}) - payoff = {fmt(e)}" for m, e in short]
    return Report("sb core-check", "fails", data, lines)


# ---------------------------------------------------------------------------
# uncertain pairs and TUU games


def _pair_inputs(args, up):
    z = parse_vector(_require(args.payoff, "--payoff"), "--payoff")
    z2 = parse_vector(_require(args.payoff2, "--payoff2"), "--payoff2")
    return z, z2


def cmd_pair_undominated(args, gf: GameFile) -> Report:
    up = _model(gf, "uncertain-pair")
    z, z2 = _pair_inputs(args, up)
    v = up.difference()
    x = tuple(a - b for a, b in zip(z, z2))
    above = [m for m in up.family if tu.coalition_sum(x, m) >= v(m)]
    below = [m for m in up.family if tu.coalition_sum(x, m) <= v(m)]
    ok = state.is_undominated(up, z, z2)
    data = {
        "difference": x,
        "above": [coalition_list(m) for m in above],
        "below": [coalition_list(m) for m in below],
        "above_weakly_balanced": state.is_weakly_balanced(above, up.n),
        "below_weakly_balanced": state.is_weakly_balanced(below, up.n),
    }
    lines = [
        f"x = z - z': {vec(x)}",
        "x(S) >= v(S) on: " + (", ".join(label(m) for m in above) or "none")
        + f" (weakly balanced: {'yes' if data['above_weakly_balanced'] else 'no'})",
        "x(S) <= v(S) on: " + (", ".join(label(m) for m in below) or "none")
        + f" (weakly balanced: {'yes' if data['below_weakly_balanced'] else 'no'})",
    ]
    return Report("pair undominated", "holds" if ok else "fails", data, lines)


def cmd_pair_stable(args, gf: GameFile) -> Report:
    up = _model(gf, "uncertain-pair")
    z, z2 = _pair_inputs(args, up)
    ok = state.is_stable(up, z, z2)
    x = tuple(a - b for a, b in zip(z, z2))
    return Report("pair stable", "holds" if ok else "fails", {"difference": x}, [f"x = z - z': {vec(x)}"])


def cmd_tuu_wsc_check(args, gf: GameFile) -> Report:
    g = _model(gf, "tuu")
    rows = parse_matrix(_require(args.allocation, "--allocation"), "--allocation")
    verdict = state.wsc_check(g, rows)
    if verdict.member:
        return Report("tuu wsc-check", "holds", {}, ["every state row is in its core and no coalition blocks"])
    if verdict.failing_state is not None:
        s = verdict.failing_state
        data = {"failing_state": g.states[s]}
        lines = [f"certificate: row {g.states[s]} is not in the core of its state game"]
        lines += [f"  excess({label(m)}) = {fmt(e)}" for m, e in tu.core_violations(g.games[s], rows[s])]
        return Report("tuu wsc-check", "fails", data, lines)
    c = verdict.blocking
    data = {"blocking": coalition_list(c), "witness": [list(r) for r in verdict.witness]}
    lines = [f"certificate: coalition {label(c)} blocks with per-state core allocations"]
    lines += table([(lab, vec(r)) for lab, r in zip(g.states, verdict.witness)])
    return Report("tuu wsc-check", "fails", data, lines)


# ---------------------------------------------------------------------------
# bel


def _contract(args, bg) -> bel.Contract:
    rows = parse_matrix(_require(args.contract, "--contract"), "--contract")
    return bel.grand_contract(bg, rows)


def _contract_lines(bg, c: bel.Contract) -> list[str]:
    return table([(w, vec(r)) for w, r in zip(bg.worlds, c.rows)])


def _tri(t: bel.Tristate) -> str:
    return t.value


def cmd_bel_core_check(args, gf: GameFile) -> Report:
    bg = _model(gf, "bel")
    c = _contract(args, bg)
    verdict = bel.ex_ante_core_contains(bg, c, exact=args.exact)
    data: dict = {"prior": "probability" if bg.probability else ("common belief" if bg.common else "heterogeneous")}
    lines = [f"prior: {data['prior']}"]
    if bg.probability:
        big = bel.expected_game(bg)
        y = bel.expected_payoffs(bg, c)
        data["expected_payoffs"] = y
        lines.append(f"expected payoffs: {vec(y)}")
        bad = [(m, big(m) - tu.coalition_sum(y, m)) for m in range(1, bg.grand + 1)]
        bad = [(m, e) for m, e in bad if e > 0]
        if bad:
            data["violations"] = [{"coalition": coalition_list(m), "excess": e} for m, e in bad]
            lines.append("certificate:")
            lines += [f"  V({label(m)}) - y({label(m)}) = {fmt(e)}" for m, e in bad]
        return Report("bel core-check", _tri(verdict), data, lines)
    conds = bel.ex_ante_core_conditions(bg, c)
    nec_fail = [k.coalition for k in conds if not k.necessary]
    suf_fail = [k.coalition for k in conds if k.sufficient is False]
    data["necessary_fails"] = [coalition_list(m) for m in nec_fail]
    data["sufficient_fails"] = [coalition_list(m) for m in suf_fail] if bg.common else None
    if nec_fail:
        lines.append("necessary condition (some member's belief value of v(S) within the plausibility value of the share) fails for: " + ", ".join(label(m) for m in nec_fail))
    else:
        lines.append("necessary condition holds for every coalition")
    if bg.common:
        if suf_fail:
            lines.append("sufficient condition (belief value of v(S) within the members' summed belief values) fails for: " + ", ".join(label(m) for m in suf_fail))
        else:
            lines.append("sufficient condition holds for every coalition")
    else:
        lines.append("sufficient condition not available: priors differ between players")
    if verdict is bel.Tristate.UNDETERMINED:
        lines.append("neither condition decides membership; rerun with --exact to settle it by linear programming")
    if args.exact and verdict is bel.Tristate.NO and not nec_fail:
        witness = bel.find_blocking(bg, c)
        data["blocking"] = {"coalition": coalition_list(witness.coalition), "rows": [list(r) for r in witness.rows]}
        lines.append(f"certificate: coalition {label(witness.coalition)} blocks with")
        lines += _contract_lines(bg, witness)
    return Report("bel core-check", _tri(verdict), data, lines)


def cmd_bel_expost(args, gf: GameFile) -> Report:
    bg = _model(gf, "bel")
    if args.mode == "ieong_shoham":
        c = _contract(args, bg)
        ok = bel.ex_post_core_contains(bg, contract=c, mode="ieong_shoham")
        return Report("bel expost", "holds" if ok else "fails", {"mode": args.mode}, ["mode: every world at once"])
    world = _require(args.world, "--world")
    x = parse_vector(_require(args.payoff, "--payoff"), "--payoff")
    ok = bel.ex_post_core_contains(bg, world, x)
    w = bg.world_index(world)
    data = {"mode": "default", "world": world, "payoff": x}
    lines = [f"world: {world}", f"payoff: {vec(x)}"]
    if not ok:
        g = bg.games[w]
        viol = tu.core_violations(g, tu.payoff(g, x))
        if sum(x) != g(g.grand):
            lines.append(f"not efficient: x(N) = {fmt(sum(x))}, v(N) = {fmt(g(g.grand))}")
        data["violations"] = [{"coalition": coalition_list(m), "excess": e} for m, e in viol]
        lines += [f"  excess({label(m)}) = {fmt(e)}" for m, e in viol]
    return Report("bel expost", "holds" if ok else "fails", data, lines)


def cmd_bel_expected(args, gf: GameFile) -> Report:
    bg = _model(gf, "bel")
    g = bel.expected_game(bg)
    data = {"expected_game": {label(m): g(m) for m in range(1, g.grand + 1)}}
    return Report("bel expected", "computed", data, ["expected game:"] + game_table(g))


def cmd_bel_basis(args, gf: GameFile) -> Report:
    bg = _model(gf, "bel")
    basis = bel.core_basis(bg)
    data = {"dimension": len(basis), "basis": [[list(r) for r in b.rows] for b in basis]}
    lines = [f"dimension: {len(basis)}"]
    for k, b in enumerate(basis):
        lines.append(f"vector {k + 1}:")
        lines += _contract_lines(bg, b)
    return Report("bel basis", "computed", data, lines)


def cmd_bel_convex(args, gf: GameFile) -> Report:
    bg = _model(gf, "bel")
    ok = bel.is_ex_ante_convex(bg)
    return Report("bel convex", "holds" if ok else "fails", {}, [])


def cmd_bel_marginal(args, gf: GameFile) -> Report:
    bg = _model(gf, "bel")
    order = parse_permutation(_require(args.permutation, "--permutation"), bg.n)
    c = bel.marginal_contract(bg, order)
    data = {"permutation": [i + 1 for i in order], "rows": [list(r) for r in c.rows]}
    return Report("bel marginal", "computed", data, _contract_lines(bg, c))


def cmd_bel_nucleolus(args, gf: GameFile) -> Report:
    bg = _model(gf, "bel")
    c, fiber = bel.ex_ante_prenucleolus(bg)
    data = {"rows": [list(r) for r in c.rows], "expected_payoffs": fiber.target, "fiber_dimension": fiber.dimension}
    lines = ["representative:"] + _contract_lines(bg, c)
    lines += [f"expected payoffs: {vec(fiber.target)}", f"fiber dimension: {fiber.dimension}"]
    return Report("bel nucleolus", "computed", data, lines)


def cmd_bel_bargaining(args, gf: GameFile) -> Report:
    bg = _model(gf, "bel")
    c = _contract(args, bg)
    verdict = bel.bargaining_set_contains(bg, c, strong=args.strong)
    data: dict = {"strong": args.strong}
    lines = [f"variant: {'strong' if args.strong else 'plain'}"]
    if bg.probability and verdict is bel.Tristate.NO:
        blk = bel.legitimate_block(bg, c, args.strong)
        data["blocking"] = {"coalition": coalition_list(blk.coalition), "expected": blk.expected}
        lines.append(f"certificate: {label(blk.coalition)} blocks with expected payoffs {vec(blk.expected)} and no admissible counter")
    if verdict is bel.Tristate.UNDETERMINED:
        lines.append("the contract is blocked; counterblocks are only decided for a common probability prior")
    return Report("bel bargaining", _tri(verdict), data, lines)


# ---------------------------------------------------------------------------
# argument parser


Handler = Callable[[argparse.Namespace, GameFile], Report]

COMMANDS: dict[str, dict[str, Handler]] = {
    "tu": {
        "core-check": cmd_tu_core_check,
        "core-empty": cmd_tu_core_empty,
        "nucleolus": cmd_tu_nucleolus,
        "balanced": cmd_tu_balanced,
        "marginal": cmd_tu_marginal,
    },
    "chance": {
        "budget": cmd_chance_budget,
        "excess": cmd_chance_excess,
        "prior-nucleolus": cmd_chance_prior_nucleolus,
        "adjust": cmd_chance_adjust,
    },
    "sb": {"balanced": cmd_sb_balanced, "core-check": cmd_sb_core_check},
    "pair": {"undominated": cmd_pair_undominated, "stable": cmd_pair_stable},
    "tuu": {"wsc-check": cmd_tuu_wsc_check},
    "bel": {
        "core-check": cmd_bel_core_check,
        "expost": cmd_bel_expost,
        "expected": cmd_bel_expected,
        "basis": cmd_bel_basis,
        "convex": cmd_bel_convex,
        "marginal": cmd_bel_marginal,
        "nucleolus": cmd_bel_nucleolus,
        "bargaining": cmd_bel_bargaining,
    },
}

# flags each command accepts, beyond the shared ones
FLAGS: dict[tuple[str, str], tuple[str, ...]] = {
    ("tu", "core-check"): ("payoff",),
    ("tu", "nucleolus"): ("region",),
    ("tu", "marginal"): ("permutation",),
    ("chance", "budget"): ("payoff", "structure", "alpha"),
    ("chance", "excess"): ("payoff", "coalition"),
    ("chance", "prior-nucleolus"): ("structure", "alpha"),
    ("chance", "adjust"): ("payoff", "realized", "structure", "alpha"),
    ("sb", "core-check"): ("payoff", "shares", "action"),
    ("pair", "undominated"): ("payoff", "payoff2"),
    ("pair", "stable"): ("payoff", "payoff2"),
    ("tuu", "wsc-check"): ("allocation",),
    ("bel", "core-check"): ("contract", "exact"),
    ("bel", "expost"): ("world", "payoff", "contract", "mode"),
    ("bel", "marginal"): ("permutation",),
    ("bel", "bargaining"): ("contract", "strong"),
}

FLAG_SPECS: dict[str, tuple[tuple, dict]] = {
    "payoff": (("--payoff",), {"help": "comma-separated rationals, e.g. 1/3,1/3,1/3"}),
    "payoff2": (("--payoff2",), {"help": "second-state payoff vector"}),
    "permutation": (("--permutation",), {"help": "player order, e.g. 2,1,3"}),
    "coalition": (("--coalition",), {"help": "comma-separated players, e.g. 1,2"}),
    "structure": (("--structure",), {"help": "blocks separated by ';', e.g. 1,2;3"}),
    "alpha": (("--alpha",), {"help": "fractile per block separated by ';' (one value applies to all)"}),
    "realized": (("--realized",), {"help": "realized worth per block separated by ';'"}),
    "shares": (("--shares",), {"help": "risk-sharing vector r"}),
    "action": (("--action",), {"help": "grand-coalition action label"}),
    "allocation": (("--allocation",), {"help": "state rows separated by ';', e.g. 1,1;1,3"}),
    "contract": (("--contract",), {"help": "world rows separated by ';', one column per player"}),
    "world": (("--world",), {"help": "world label"}),
    "mode": (("--mode",), {"choices": ("default", "ieong_shoham"), "default": "default"}),
    "region": (("--region",), {"choices": ("pre-imputations", "imputations"), "default": "pre-imputations"}),
    "exact": (("--exact",), {"action": "store_true", "help": "settle undetermined cases by linear programming"}),
    "strong": (("--strong",), {"action": "store_true", "help": "strong bargaining set"}),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--timing", action="store_true", help="report wall-clock solve time")
    parser = argparse.ArgumentParser(prog="ucg", description="Cooperative games under uncertainty.")
    groups = parser.add_subparsers(dest="group", required=True)
    for group, commands in COMMANDS.items():
        gp = groups.add_parser(group)
        subs = gp.add_subparsers(dest="command", required=True)
        for name in commands:
            sp = subs.add_parser(name, parents=[common])
            sp.add_argument("file", help="JSON game file")
            for flag in FLAGS.get((group, name), ()):
                names, kw = FLAG_SPECS[flag]
                sp.add_argument(*names, **kw)
    return parser


def _defaults(args: argparse.Namespace) -> None:
    for flag, (_, kw) in FLAG_SPECS.items():
        if not hasattr(args, flag):
            setattr(args, flag, kw.get("default", False if kw.get("action") == "store_true" else None))


@dataclass
class Outcome:
    report: Optional[Report]
    exit_code: int
    error: str = ""
    mode: str = "text"

    def output(self) -> bytes:
        return format_report(self.report, self.mode) if self.report is not None else b""


def run_command(argv: Sequence[str]) -> Outcome:
    """Parse ``argv`` and run one command. Input problems, including usage
    errors, give exit code 2 and no report."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return Outcome(None, EXIT_INPUT_ERROR if exc.code else 0)
    _defaults(args)
    handler = COMMANDS[args.group][args.command]
    try:
        gf = parse_game_file(args.file)
        start = time.perf_counter()
        report = handler(args, gf)
        if args.timing:
            report.timing = time.perf_counter() - start
    except (UcgError, ValueError) as exc:
        return Outcome(None, EXIT_INPUT_ERROR, str(exc), args.format)
    return Outcome(report, report.exit_code, "", args.format)


def main(argv: Optional[Sequence[str]] = None) -> int:
    out = run_command(sys.argv[1:] if argv is None else argv)
    if out.report is None:
        if out.error:
            print(f"ucg: error: {out.error}", file=sys.stderr)
        return out.exit_code
    sys.stdout.buffer.write(out.output())
    sys.stdout.flush()
    return out.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
