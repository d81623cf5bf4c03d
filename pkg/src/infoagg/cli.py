"""Command-line entry point: ``infoagg <command> ...``.

Every command prints one JSON document on stdout. Exit status is 0 on
success / feasible / pass, 1 on infeasible / violation, 2 on bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from .extended import (
    ExtendedGame,
    ExtendedMediatorSpec,
    NotSeparable,
    check_separability,
    embed_game,
    load_any,
)
from .game import GameError, format_rational as fr, outcome_to_dict, parse_outcome
from .mechanism import MechanismError, MediatorSpec
from .optimize import Objective, check_outcome, optimize, order_for
from .order import DIRECT, Mode
from .verify import CapExceeded, DEFAULT_CAP, simulate, verify_coalitions, verify_receiver


class InputError(Exception):
    def __init__(self, message, extra=None):
        super().__init__(message)
        self.extra = extra or {}


def _read(path: str) -> tuple[str, str]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return data.decode("utf-8"), hashlib.sha256(data).hexdigest()
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8") from None


def _label(game, node) -> str:
    return game.node_label(node) if isinstance(game, ExtendedGame) else node


def _spec(game, k, mode, outcome, validate=True):
    cls = ExtendedMediatorSpec if isinstance(game, ExtendedGame) else MediatorSpec
    return cls(game, k, mode, outcome, validate=validate)


def separability_json(report) -> dict:
    w = report.witness
    out = {"separable": report.separable, "coalitions_checked": report.coalitions_checked}
    if w is not None:
        out["witness"] = {
            "sender": w.sender + 1,
            "profile": list(w.profile),
            "coalition_1": [i + 1 for i in w.coalition_1],
            "pref_1": w.pref_1.value,
            "coalition_2": [i + 1 for i in w.coalition_2],
            "pref_2": w.pref_2.value,
        }
    return out


def order_json(game, order) -> dict:
    lab = lambda w: _label(game, w)  # noqa: E731
    witnesses = []
    for u, v in order.edge_list():
        wit = order.witnesses[(u, v)]
        witnesses.append(
            {"edge": [lab(u), lab(v)], "witness": wit if wit == DIRECT else list(wit)}
        )
    return {
        "nodes": [lab(w) for w in order.nodes],
        "edges": [[lab(u), lab(v)] for u, v in order.edge_list()],
        "reach": [[bool(x) for x in row] for row in order.reach],
        "witnesses": witnesses,
    }


def feasibility_json(game, report) -> dict:
    lab = lambda w: _label(game, w)  # noqa: E731
    return {
        "feasible": report.feasible,
        "violated_order": [
            {"from": lab(u), "to": lab(v), "o_from": fr(a), "o_to": fr(b)}
            for u, v, a, b in report.violated_order
        ],
        "violated_receiver": [
            {"action": a, "receiver_utility": fr(er), "baseline": fr(ua)}
            for a, er, ua in report.violated_receiver
        ],
    }


def verification_json(spec, receiver, coalition) -> dict:
    out = {"passed": receiver.passed and coalition.passed}
    rv = receiver.receiver_violation
    out["receiver_violation"] = (
        None if rv is None else {"strategy": rv.strategy, "gain": fr(rv.gain)}
    )
    cv = coalition.coalition_violation
    if cv is None:
        out["coalition_violation"] = None
    else:
        g = spec.game
        if isinstance(g, ExtendedGame):
            obs_label = lambda obs: ",".join(obs)  # noqa: E731
            msg_label = lambda x: x  # noqa: E731
        else:
            obs_label = lambda obs: g.states[obs[0]]  # noqa: E731
            msg_label = lambda x: g.states[x]  # noqa: E731
        out["coalition_violation"] = {
            "coalition": [i + 1 for i in cv.coalition],
            "deviation": {obs_label(o): [msg_label(x) for x in msg] for o, msg in cv.deviation.items()},
            "deltas": {str(i + 1): fr(d) for i, d in cv.deltas.items()},
        }
    out["stats"] = {**receiver.stats, **coalition.stats}
    return out


# ------------------------------------------------------------------ commands


def cmd_order(args, inputs):
    game = _load_game(args.game, inputs)
    return order_json(game, order_for(game, args.k, args.mode)), 0


def cmd_check(args, inputs):
    game = _load_game(args.game, inputs)
    o = _load_outcome(args.outcome, game, inputs)
    report = check_outcome(game, args.k, args.mode, o)
    return feasibility_json(game, report), 0 if report.feasible else 1


def cmd_optimize(args, inputs):
    game = _load_game(args.game, inputs)
    try:
        obj = Objective.parse(args.objective)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    outcome, value = optimize(game, args.k, args.mode, obj)
    payload = outcome_to_dict(outcome, game)
    payload["value"] = fr(value)
    return payload, 0


def cmd_mechanism(args, inputs):
    game = _load_game(args.game, inputs)
    o = _load_outcome(args.outcome, game, inputs)
    spec = _spec(game, args.k, args.mode, o)
    messages = [x.strip() for x in args.messages.split(",")]
    return {"messages": messages, "q": fr(spec.value(spec.keys(messages)))}, 0


def cmd_verify(args, inputs):
    game = _load_game(args.game, inputs)
    o = _load_outcome(args.outcome, game, inputs)
    # an order-infeasible outcome is still verified so the deviation shows up
    spec = _spec(game, args.k, args.mode, o, validate=False)
    receiver = verify_receiver(game, o)
    coalition = verify_coalitions(game, args.k, args.mode, spec, caps=args.caps)
    payload = verification_json(spec, receiver, coalition)
    payload["order_feasible"] = spec.order_feasible
    return payload, 0 if payload["passed"] else 1


def cmd_simulate(args, inputs):
    game = _load_game(args.game, inputs)
    o = _load_outcome(args.outcome, game, inputs)
    spec = _spec(game, args.k, args.mode, o)
    res = simulate(game, spec, args.rounds, args.seed)
    nodes = {}
    for w in game.nodes:
        freq = res.frequency(w)
        nodes[_label(game, w)] = {
            "visits": res.visits[w],
            "zeros": res.zeros[w],
            "frequency": None if freq is None else fr(freq),
        }
    return {"rounds": res.rounds, "seed": res.seed, "states": nodes}, 0


def cmd_separability(args, inputs):
    game = _load_game(args.game, inputs)
    if not isinstance(game, ExtendedGame):
        game = embed_game(game)
    report = check_separability(game, args.k, caps=args.caps)
    return separability_json(report), 0 if report.separable else 1


def _load_game(path, inputs):
    text, digest = _read(path)
    inputs["game"] = digest
    return load_any(text)


def _load_outcome(path, game, inputs):
    text, digest = _read(path)
    inputs["outcome"] = digest
    return parse_outcome(text, game)


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infoagg",
        description="Coalition-resilient mediators for information aggregation games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, outcome=False, mode=True):
        p = sub.add_parser(name, help=help)
        p.add_argument("game", help="game file (JSON)")
        if outcome:
            p.add_argument("outcome", help="outcome file (JSON)")
        p.add_argument("--k", type=int, required=True, help="largest coalition size")
        if mode:
            p.add_argument(
                "--mode", choices=["weak", "strong"], default="weak",
                help="weak: every deviator must gain; strong: any member gaining counts",
            )
        p.set_defaults(func=func)
        return p

    add("order", cmd_order, "order constraints between states")
    add("check", cmd_check, "is an outcome implementable?", outcome=True)
    p = add("optimize", cmd_optimize, "best implementable outcome")
    p.add_argument("--objective", default="receiver", help="receiver | sender:i | welfare[:w1,..,wn,wr]")
    p = add("mechanism", cmd_mechanism, "evaluate the mediator on one message profile", outcome=True)
    p.add_argument("--messages", required=True, help="comma-separated reports, one per sender")
    p = add("verify", cmd_verify, "brute-force incentive check of the mediator", outcome=True)
    p.add_argument("--caps", type=int, default=DEFAULT_CAP, help="enumeration limit")
    p = add("simulate", cmd_simulate, "Monte-Carlo playouts of the honest mediator", outcome=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p = add("separability", cmd_separability, "k-separability of an extended game", mode=False)
    p.add_argument("--caps", type=int, default=DEFAULT_CAP, help="enumeration limit")
    return parser


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "mode"):
        args.mode = Mode.parse(args.mode)
    echo = {k: (v.value if isinstance(v, Mode) else v) for k, v in vars(args).items() if k != "func"}
    inputs: dict = {}
    try:
        payload, status = args.func(args, inputs)
    except NotSeparable as exc:
        error, extra = str(exc), {"separability": separability_json(exc.report)}
    except CapExceeded as exc:
        error, extra = str(exc), {"required": exc.required, "cap": exc.cap}
    except InputError as exc:
        error, extra = str(exc), exc.extra
    except (GameError, MechanismError, ValueError, IndexError) as exc:
        error, extra = str(exc), {}
    else:
        _emit({"command": echo, "inputs": inputs, "result": payload, "status": status})
        return status
    print(f"infoagg: error: {error}", file=sys.stderr)
    _emit({"command": echo, "inputs": inputs, "error": error, **extra, "status": 2})
    return 2


if __name__ == "__main__":
    sys.exit(main())
