"""Brute-force incentive checks and Monte-Carlo playouts for constructed mediators.

Nothing here relies on the order characterization: coalition deviations are
enumerated directly and scored with exact expected utilities computed from
the mediator's outputs. That independence is what makes this module usable
as an oracle for the rest of the package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .game import RECEIVER, Outcome, expected_utility, receiver_baseline
from .order import Mode

DEFAULT_CAP = 10**6


class CapExceeded(RuntimeError):
    def __init__(self, required: int, cap: int):
        super().__init__(
            f"exhaustive check needs {required} (coalition, deviation) pairs, cap is {cap}; "
            "shrink the instance or raise the cap"
        )
        self.required = required
        self.cap = cap


@dataclass
class ReceiverViolation:
    strategy: str
    gain: Fraction


@dataclass
class CoalitionViolation:
    coalition: tuple  # 0-based sender indices
    deviation: dict  # observation -> messages of the coalition, in coalition order
    deltas: dict  # sender -> change in expected utility


@dataclass
class VerificationReport:
    passed: bool
    receiver_violation: Optional[ReceiverViolation] = None
    coalition_violation: Optional[CoalitionViolation] = None
    stats: dict = field(default_factory=dict)


# ------------------------------------------------------------------ receiver

RECEIVER_STRATEGIES = ("always-1", "always-0", "invert")


def receiver_strategy_values(game, o: Outcome) -> dict:
    """Receiver expected utility for following and for each alternative strategy."""
    follow = expected_utility(game, RECEIVER, o)
    xs = o.values(game)
    invert = sum(
        (p * (x * u1 + (1 - x) * u0) for p, x, (u0, u1) in zip(game.prior, xs, game.receiver_u)),
        Fraction(0),
    )
    return {
        "follow": follow,
        "always-0": receiver_baseline(game, 0),
        "always-1": receiver_baseline(game, 1),
        "invert": invert,
    }


def verify_receiver(game, o: Outcome) -> VerificationReport:
    vals = receiver_strategy_values(game, o)
    for name in RECEIVER_STRATEGIES:
        gain = vals[name] - vals["follow"]
        if gain > 0:
            return VerificationReport(
                passed=False,
                receiver_violation=ReceiverViolation(name, gain),
                stats={"receiver_strategies": len(RECEIVER_STRATEGIES)},
            )
    return VerificationReport(passed=True, stats={"receiver_strategies": len(RECEIVER_STRATEGIES)})


# ------------------------------------------------------------------ senders


@dataclass
class _Instance:
    """Truthful profiles with their probabilities, for either game model."""

    n: int
    alphabets: list  # message keys per sender
    support: list  # truthful profiles (tuples of keys)
    prob: list
    sender_u: tuple  # sender_u[i][s] = (u0, u1)
    value: object  # profile -> probability of action 0
    node_label: object
    msg_label: object


def _instance(spec) -> _Instance:
    from .extended import ExtendedMediatorSpec

    g = spec.game
    if isinstance(spec, ExtendedMediatorSpec):
        return _Instance(
            n=g.n,
            alphabets=[list(a) for a in g.alphabets],
            support=[tuple(p) for p in g.support],
            prob=list(g.prior),
            sender_u=g.sender_u,
            value=spec.core.value,
            node_label=lambda key: ",".join(key),
            msg_label=lambda x: x,
        )
    return _Instance(
        n=g.n,
        alphabets=[list(range(g.m))] * g.n,
        support=[(s,) * g.n for s in range(g.m)],
        prob=list(g.prior),
        sender_u=g.sender_u,
        value=spec.core.value,
        node_label=lambda key: g.states[key[0]],
        msg_label=lambda x: g.states[x],
    )


def coalitions(n: int, k: int):
    """Coalitions of size 1..k, by size then lexicographically."""
    for size in range(1, k + 1):
        yield from itertools.combinations(range(n), size)


def _observation_classes(inst: _Instance, K) -> list:
    """Truthful node indices grouped by what coalition ``K`` observes, in first-seen order."""
    groups: dict = {}
    for s, prof in enumerate(inst.support):
        groups.setdefault(tuple(prof[i] for i in K), []).append(s)
    return list(groups.items())


def enumeration_size(inst: _Instance, k: int) -> int:
    total = 0
    for K in coalitions(inst.n, k):
        msgs = 1
        for i in K:
            msgs *= len(inst.alphabets[i])
        total += msgs ** len(_observation_classes(inst, K))
    return total


def _gain_table(inst: _Instance, K, members_nodes, cache):
    """Per message tuple, per member: gain from sending it at these truthful nodes."""
    rows = []
    for msg in itertools.product(*(inst.alphabets[i] for i in K)):
        gains = [Fraction(0)] * len(K)
        for s in members_nodes:
            truth = inst.support[s]
            prof = list(truth)
            for i, x in zip(K, msg):
                prof[i] = x
            prof = tuple(prof)
            for key in (prof, truth):
                if key not in cache:
                    cache[key] = inst.value(key)
            delta = cache[prof] - cache[truth]
            if delta == 0:
                continue
            w = inst.prob[s] * delta
            for pos, i in enumerate(K):
                u0, u1 = inst.sender_u[i][s]
                gains[pos] += w * (u0 - u1)
        rows.append((msg, tuple(gains)))
    return rows


def _pareto(vectors):
    uniq = sorted(set(vectors), reverse=True)
    keep = []
    for v in uniq:
        if not any(all(a >= b for a, b in zip(w, v)) for w in keep):
            keep.append(v)
    return keep


def _completion_exists(partial, fronts) -> bool:
    """Whether adding one vector from each front makes every coordinate positive."""
    if not fronts:
        return all(x > 0 for x in partial)
    # coordinate-wise upper bound prunes hopeless branches
    bound = list(partial)
    for front in fronts:
        for pos in range(len(bound)):
            bound[pos] += max(v[pos] for v in front)
    if not all(x > 0 for x in bound):
        return False
    head, rest = fronts[0], fronts[1:]
    return any(
        _completion_exists(tuple(a + b for a, b in zip(partial, v)), rest) for v in head
    )


def _resilient_search(inst, K, cache):
    classes = _observation_classes(inst, K)
    tables = [_gain_table(inst, K, nodes, cache) for _, nodes in classes]
    fronts = [_pareto(g for _, g in table) for table in tables]
    zero = (Fraction(0),) * len(K)
    if not _completion_exists(zero, fronts):
        return None
    # greedy lexicographic choice keeps the witness canonical
    partial, chosen = zero, []
    for c, table in enumerate(tables):
        for msg, g in table:
            nxt = tuple(a + b for a, b in zip(partial, g))
            if _completion_exists(nxt, fronts[c + 1:]):
                partial = nxt
                chosen.append(msg)
                break
    return {obs: msg for (obs, _), msg in zip(classes, chosen)}, partial


def _strong_search(inst, K, cache):
    for obs, nodes in _observation_classes(inst, K):
        for msg, gains in _gain_table(inst, K, nodes, cache):
            if any(x > 0 for x in gains):
                return {obs: msg}, gains
    return None


def verify_coalitions(game, k: int, mode, spec, caps: int = DEFAULT_CAP) -> VerificationReport:
    """Exhaustive search for a profitable coalition deviation against ``spec``'s mediator."""
    mode = Mode.parse(mode)
    if spec.game is not game:
        raise ValueError("spec was built for a different game")
    if k > game.n:
        raise ValueError(f"coalition bound {k} exceeds the number of senders")
    inst = _instance(spec)
    required = enumeration_size(inst, k)
    if required > caps:
        raise CapExceeded(required, caps)
    cache: dict = {}
    search = _resilient_search if mode is Mode.RESILIENT else _strong_search
    examined = 0
    for K in coalitions(inst.n, k):
        examined += 1
        found = search(inst, K, cache)
        if found is not None:
            deviation, gains = found
            return VerificationReport(
                passed=False,
                coalition_violation=CoalitionViolation(
                    coalition=K, deviation=deviation, deltas=dict(zip(K, gains))
                ),
                stats={"coalitions": examined, "deviations": required},
            )
    return VerificationReport(passed=True, stats={"coalitions": examined, "deviations": required})


def replay_deviation(spec, coalition, deviation: dict) -> dict:
    """Recompute every coalition member's utility change from scratch.

    ``deviation`` maps an observation (the coalition's truthful messages) to
    the messages sent instead; unlisted observations are reported honestly.
    """
    inst = _instance(spec)
    before = {i: Fraction(0) for i in coalition}
    after = {i: Fraction(0) for i in coalition}
    for s, truth in enumerate(inst.support):
        obs = tuple(truth[i] for i in coalition)
        prof = list(truth)
        for i, x in zip(coalition, deviation.get(obs, obs)):
            prof[i] = x
        q_true, q_dev = inst.value(truth), inst.value(tuple(prof))
        for i in coalition:
            u0, u1 = inst.sender_u[i][s]
            before[i] += inst.prob[s] * (q_true * u0 + (1 - q_true) * u1)
            after[i] += inst.prob[s] * (q_dev * u0 + (1 - q_dev) * u1)
    return {i: after[i] - before[i] for i in coalition}


# ------------------------------------------------------------------ playouts


@dataclass
class SimulationResult:
    rounds: int
    seed: int
    visits: dict  # node -> number of rounds in which it was drawn
    zeros: dict  # node -> number of those rounds recommending action 0

    def frequency(self, node) -> Optional[Fraction]:
        v = self.visits[node]
        return Fraction(self.zeros[node], v) if v else None


def simulate(game, spec, rounds: int, seed: int) -> SimulationResult:
    """Play the honest profile through the mediator ``rounds`` times."""
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    inst = _instance(spec)
    rng = np.random.default_rng(seed)
    probs = np.array([float(p) for p in inst.prob])
    probs /= probs.sum()
    q = np.array([float(inst.value(prof)) for prof in inst.support])
    drawn = rng.choice(len(inst.support), size=rounds, p=probs)
    action0 = rng.random(rounds) < q[drawn]
    visits = np.bincount(drawn, minlength=len(inst.support))
    zeros = np.bincount(drawn[action0], minlength=len(inst.support))
    nodes = list(game.nodes)
    return SimulationResult(
        rounds=rounds,
        seed=seed,
        visits={w: int(c) for w, c in zip(nodes, visits)},
        zeros={w: int(c) for w, c in zip(nodes, zeros)},
    )
