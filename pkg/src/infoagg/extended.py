"""Extended games: each sender sees a private signal drawn from a joint prior.

Support profiles take over the role of pure inputs. A sender's preference at
a profile is the sign of its conditional expected utility gain given what its
coalition jointly observes; the order machinery is only well defined when
that preference does not depend on the coalition (k-separability).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .game import (
    RECEIVER,
    Game,
    GameError,
    Outcome,
    Pref,
    _load_json,
    _pair,
    check_prior,
    compare_pair,
    format_rational,
    to_rational,
)
from .mechanism import MechanismError, MediatorCore
from .optimize import order_violations
from .order import DIRECT, Mode, assemble_order, check_k, quantified

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class ExtendedGame:
    """Signal alphabets per sender plus the support of the joint signal prior.

    ``sender_u[i][s]`` and ``receiver_u[s]`` are utility pairs at support
    profile ``s``. Signals are strings; senders are indexed from 0.
    """

    alphabets: tuple[tuple[str, ...], ...]
    support: tuple[tuple[str, ...], ...]
    prior: tuple[Fraction, ...]
    receiver_u: tuple[tuple[Fraction, Fraction], ...]
    sender_u: tuple[tuple[tuple[Fraction, Fraction], ...], ...]

    def __post_init__(self):
        n = len(self.alphabets)
        if n < 1:
            raise GameError("an extended game needs at least one sender")
        for i, alpha in enumerate(self.alphabets):
            if not alpha or len(set(alpha)) != len(alpha):
                raise GameError(f"sender {i + 1}: alphabet must be non-empty and duplicate-free")
        m = len(self.support)
        if m < 1:
            raise GameError("support must be non-empty")
        if len(set(self.support)) != m:
            raise GameError("support profiles must be distinct")
        for prof in self.support:
            if len(prof) != n:
                raise GameError(f"profile {prof} has {len(prof)} signals for {n} senders")
            for i, x in enumerate(prof):
                if x not in self.alphabets[i]:
                    raise GameError(f"signal {x!r} is not in sender {i + 1}'s alphabet")
        if len(self.prior) != m or len(self.receiver_u) != m:
            raise GameError("one probability and receiver utility per support profile")
        check_prior(self.prior, "support probabilities")
        if len(self.sender_u) != n or any(len(row) != m for row in self.sender_u):
            raise GameError("one utility pair per sender per support profile")
        object.__setattr__(self, "_index", {p: s for s, p in enumerate(self.support)})
        object.__setattr__(self, "_pref_cache", {})

    @property
    def n(self) -> int:
        return len(self.alphabets)

    @property
    def m(self) -> int:
        return len(self.support)

    @property
    def nodes(self):
        return self.support

    def node_index(self, node) -> int:
        if isinstance(node, int) and not isinstance(node, bool):
            if not 0 <= node < self.m:
                raise IndexError(f"support index {node} out of range")
            return node
        try:
            return self._index[tuple(node)]
        except KeyError:
            raise IndexError(f"profile {node!r} is not in the support") from None

    @staticmethod
    def node_label(node) -> str:
        return ",".join(node)

    @staticmethod
    def parse_node(key: str) -> tuple:
        return tuple(x.strip() for x in key.split(","))

    def utility(self, player, s: int):
        if player == RECEIVER:
            return self.receiver_u[s]
        if not 0 <= player < self.n:
            raise IndexError(f"sender index {player} out of range")
        return self.sender_u[player][s]

    def players(self) -> list:
        return list(range(self.n)) + [RECEIVER]

    def coalition_prefs(self, K) -> dict:
        """``{(s, i): Pref}`` for every support profile ``s`` and member ``i`` of ``K``."""
        K = tuple(sorted(K))
        cache = self._pref_cache
        if K not in cache:
            sums: dict = {}
            for s, prof in enumerate(self.support):
                obs = tuple(prof[i] for i in K)
                acc = sums.setdefault(obs, [Fraction(0)] * len(K))
                for pos, i in enumerate(K):
                    u0, u1 = self.sender_u[i][s]
                    acc[pos] += self.prior[s] * (u0 - u1)
            out = {}
            for s, prof in enumerate(self.support):
                acc = sums[tuple(prof[i] for i in K)]
                for pos, i in enumerate(K):
                    out[(s, i)] = compare_pair(acc[pos], Fraction(0))
            cache[K] = out
        return cache[K]


def embed_game(g: Game) -> ExtendedGame:
    """Base game as an extended one where every sender's signal is the state."""
    return ExtendedGame(
        alphabets=(tuple(g.states),) * g.n,
        support=tuple((w,) * g.n for w in g.states),
        prior=g.prior,
        receiver_u=g.receiver_u,
        sender_u=g.sender_u,
    )


def coalition_preference(xg: ExtendedGame, i: int, K, profile) -> Pref:
    K = tuple(sorted(set(K)))
    if i not in K:
        raise ValueError(f"sender {i} is not in coalition {K}")
    if any(not 0 <= j < xg.n for j in K):
        raise IndexError("coalition member out of range")
    s = xg.node_index(profile)
    return xg.coalition_prefs(K)[(s, i)]


# ------------------------------------------------------------------ separability


@dataclass
class SeparabilityWitness:
    sender: int
    profile: tuple
    coalition_1: tuple
    pref_1: Pref
    coalition_2: tuple
    pref_2: Pref


@dataclass
class SeparabilityReport:
    separable: bool
    witness: Optional[SeparabilityWitness] = None
    coalitions_checked: int = 0


class NotSeparable(ValueError):
    def __init__(self, report: SeparabilityReport):
        w = report.witness
        super().__init__(
            f"game is not separable: sender {w.sender + 1} at {w.profile} prefers "
            f"{w.pref_1.value} in {w.coalition_1} but {w.pref_2.value} in {w.coalition_2}"
        )
        self.report = report


def _coalitions_with(i: int, n: int, k: int):
    """Coalitions containing ``i`` of size at most ``k``: largest first, then lexicographic."""
    others = [j for j in range(n) if j != i]
    for size in range(min(k, n), 0, -1):
        for rest in itertools.combinations(others, size - 1):
            yield tuple(sorted((i,) + rest))


def check_separability(xg: ExtendedGame, k: int, caps: int = DEFAULT_CAP) -> SeparabilityReport:
    """Does every sender's preference at every support profile ignore its coalition?

    Senders are scanned in order, each over the support in order. Conflicts
    between strict opposite preferences are reported before conflicts
    involving indifference.
    """
    n = xg.n
    per_sender = {i: list(_coalitions_with(i, n, k)) for i in range(n)}
    required = xg.m * sum(len(v) for v in per_sender.values())
    if required > caps:
        from .verify import CapExceeded

        raise CapExceeded(required, caps)
    prefs = {
        (s, i): [(K, xg.coalition_prefs(K)[(s, i)]) for K in per_sender[i]]
        for s in range(xg.m)
        for i in range(n)
    }
    checked = sum(len(v) for v in per_sender.values())

    def witness(s, i, first, second):
        (K1, p1), (K2, p2) = first, second
        return SeparabilityWitness(i, xg.support[s], K1, p1, K2, p2)

    for i in range(n):
        for s in range(xg.m):
            seen = prefs[(s, i)]
            zero = next((e for e in seen if e[1] is Pref.ZERO), None)
            one = next((e for e in seen if e[1] is Pref.ONE), None)
            if zero and one:
                first, second = (zero, one) if seen.index(zero) < seen.index(one) else (one, zero)
                return SeparabilityReport(False, witness(s, i, first, second), checked)
    for i in range(n):
        for s in range(xg.m):
            seen = prefs[(s, i)]
            other = next((e for e in seen if e[1] is not seen[0][1]), None)
            if other:
                return SeparabilityReport(False, witness(s, i, seen[0], other), checked)
    return SeparabilityReport(True, None, checked)


def separable_prefs(xg: ExtendedGame, k: int) -> list:
    """``prefs[s][i]``, raising :class:`NotSeparable` when it is not well defined."""
    report = check_separability(xg, k)
    if not report.separable:
        raise NotSeparable(report)
    return [[xg.coalition_prefs((i,))[(s, i)] for i in range(xg.n)] for s in range(xg.m)]


# ------------------------------------------------------------------ order


def _direct(prefs, k, mode, x, y, s, t) -> bool:
    diff = [i for i, (a, b) in enumerate(zip(x, y)) if a != b]
    if not diff or len(diff) > k:
        return False
    return quantified(prefs[s], diff, Pref.ONE, mode) or quantified(prefs[t], diff, Pref.ZERO, mode)


def _resilient_chain(xg, prefs, k, s, t):
    x, y = xg.support[s], xg.support[t]
    stay, leave, free = [], [], []
    for i in range(xg.n):
        if x[i] == y[i]:
            continue  # pinned to the common signal
        up = prefs[s][i] is Pref.ONE
        down = prefs[t][i] is Pref.ZERO
        if up and down:
            free.append(i)
        elif up:
            leave.append(i)
        elif down:
            stay.append(i)
        else:
            return None  # blocker
    if len(stay) > k or len(leave) > k or len(stay) + len(leave) + len(free) > 2 * k:
        return None
    to_x = max(0, min(len(free), k - len(stay)))
    profile = list(x)
    for i in leave:
        profile[i] = y[i]
    for pos, i in enumerate(free):
        if pos >= to_x:
            profile[i] = y[i]
    profile = tuple(profile)
    if profile == x:
        if not free:
            return None
        profile = list(profile)
        profile[free[-1]] = y[free[-1]]
        profile = tuple(profile)
    if profile == y:
        return None
    return profile


def _strong_chain(xg, prefs, k, s, t):
    x, y = xg.support[s], xg.support[t]
    n = xg.n
    ups = [i for i in range(n) if prefs[s][i] is Pref.ONE]
    downs = [j for j in range(n) if prefs[t][j] is Pref.ZERO]

    def outside(i, avoid):
        return next((v for v in xg.alphabets[i] if v not in avoid), None)

    def attempt(i, j):
        fixed = {}
        cx = cy = 0  # |senders not reporting x|, |senders not reporting y|
        if i == j:
            v = outside(i, {x[i], y[i]})
            if v is None:
                return None
            fixed[i] = v
            cx, cy = 1, 1
        else:
            if x[i] != y[i]:
                fixed[i] = y[i]
                cx += 1
            else:
                v = outside(i, {x[i]})
                if v is None:
                    return None
                fixed[i] = v
                cx, cy = cx + 1, cy + 1
            if x[j] != y[j]:
                fixed[j] = x[j]
                cy += 1
            else:
                v = outside(j, {x[j]})
                if v is None:
                    return None
                fixed[j] = v
                cx, cy = cx + 1, cy + 1
        rest = [r for r in range(n) if r not in fixed and x[r] != y[r]]
        if cx > k or cy > k or cx + cy + len(rest) > 2 * k:
            return None
        budget = k - cx
        profile = list(x)
        for r, v in fixed.items():
            profile[r] = v
        for pos, r in enumerate(rest):
            profile[r] = y[r] if pos < budget else x[r]
        return tuple(profile)

    pairs = [(i, j) for i in ups for j in downs if i != j] + [(i, i) for i in ups if i in downs]
    for i, j in pairs:
        profile = attempt(i, j)
        if profile is not None:
            return profile
    return None


def build_order_extended(xg: ExtendedGame, k: int, mode):
    mode = Mode.parse(mode)
    check_k(k, xg.n)
    prefs = separable_prefs(xg, k)
    chain = _resilient_chain if mode is Mode.RESILIENT else _strong_chain
    found = {}
    for s, x in enumerate(xg.support):
        for t, y in enumerate(xg.support):
            if s == t:
                continue
            if _direct(prefs, k, mode, x, y, s, t):
                found[(s, t)] = DIRECT
                continue
            witness = chain(xg, prefs, k, s, t)
            if witness is not None:
                found[(s, t)] = witness
    return assemble_order(xg.support, k, mode, found)


def prec_holds_extended(xg: ExtendedGame, k: int, mode, a, b, prefs=None) -> bool:
    """One-step relation between signal reports; support profiles play the pure role."""
    mode = Mode.parse(mode)
    a, b = tuple(a), tuple(b)
    if len(a) != xg.n or len(b) != xg.n:
        raise ValueError("profile length does not match the number of senders")
    if prefs is None:
        prefs = separable_prefs(xg, k)
    diff = [i for i, (p, q) in enumerate(zip(a, b)) if p != q]
    if not diff or len(diff) > k:
        return False
    s = xg._index.get(a)
    if s is not None and quantified(prefs[s], diff, Pref.ONE, mode):
        return True
    t = xg._index.get(b)
    return t is not None and quantified(prefs[t], diff, Pref.ZERO, mode)


# ------------------------------------------------------------------ mediator


class ExtendedMediatorSpec:
    """Extended game, bound, mode and an order-feasible outcome over support profiles."""

    def __init__(self, xg: ExtendedGame, k: int, mode, outcome: Outcome, order=None, validate=True):
        check_k(k, xg.n)
        self.game = xg
        self.k = k
        self.mode = Mode.parse(mode)
        self.outcome = outcome
        values = outcome.values(xg)
        prefs = separable_prefs(xg, k)
        self.order = order if order is not None else build_order_extended(xg, k, self.mode)
        bad = order_violations(self.order, outcome)
        self.order_feasible = not bad
        if bad and validate:
            u, v, a, b = bad[0]
            raise MechanismError(
                f"outcome is not order-feasible: o*({u}) = {a} > o*({v}) = {b}"
            )
        self.core = MediatorCore(xg.support, prefs, values, k, self.mode, strict=validate)

    def keys(self, profile) -> tuple:
        profile = tuple(profile)
        if len(profile) != self.game.n:
            raise ValueError("profile length does not match the number of senders")
        for i, x in enumerate(profile):
            if x not in self.game.alphabets[i]:
                raise ValueError(f"signal {x!r} is not in sender {i + 1}'s alphabet")
        return profile

    def value(self, keys) -> Fraction:
        return self.core.value(keys)


def eval_mediator_extended(xg: ExtendedGame, k: int, mode, o: Outcome, profile) -> Fraction:
    spec = ExtendedMediatorSpec(xg, k, mode, o)
    return spec.value(spec.keys(profile))


# ------------------------------------------------------------------ file format


def extended_from_dict(doc: dict) -> ExtendedGame:
    if doc.get("model") != "extended":
        raise GameError("expected model 'extended'")
    try:
        alphabets = tuple(tuple(str(x) for x in a) for a in doc["signals"])
        entries = doc["support"]
    except (KeyError, TypeError) as exc:
        raise GameError(f"malformed document: {exc}") from None
    n = len(alphabets)
    support, prior, recv = [], [], []
    senders = [[] for _ in range(n)]
    for pos, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise GameError(f"support entry {pos} must be an object")
        try:
            support.append(tuple(str(x) for x in entry["profile"]))
            prior.append(to_rational(entry["prob"]))
            recv.append(_pair(entry["receiver_utility"], f"support entry {pos} receiver"))
            su = entry["sender_utility"]
        except KeyError as exc:
            raise GameError(f"support entry {pos}: missing field {exc.args[0]!r}") from None
        if len(su) != n:
            raise GameError(f"support entry {pos}: {len(su)} sender utilities for {n} senders")
        for i, pair in enumerate(su):
            senders[i].append(_pair(pair, f"support entry {pos} sender {i + 1}"))
    return ExtendedGame(
        alphabets=alphabets,
        support=tuple(support),
        prior=tuple(prior),
        receiver_u=tuple(recv),
        sender_u=tuple(tuple(row) for row in senders),
    )


def parse_extended_game(text: str) -> ExtendedGame:
    return extended_from_dict(_load_json(text))


def extended_to_dict(xg: ExtendedGame) -> dict:
    f = format_rational
    return {
        "model": "extended",
        "signals": [list(a) for a in xg.alphabets],
        "support": [
            {
                "profile": list(prof),
                "prob": f(xg.prior[s]),
                "receiver_utility": [f(v) for v in xg.receiver_u[s]],
                "sender_utility": [[f(v) for v in xg.sender_u[i][s]] for i in range(xg.n)],
            }
            for s, prof in enumerate(xg.support)
        ],
    }


def majority_game(n: int = 5) -> ExtendedGame:
    """Uniform independent bits; everyone gets 1 iff the action matches the majority bit."""
    if n % 2 == 0:
        raise ValueError("majority game needs an odd number of senders")
    support = tuple(itertools.product("01", repeat=n))
    p = Fraction(1, 2**n)

    def pair(prof):
        maj = 1 if prof.count("1") > n // 2 else 0
        return (Fraction(1), Fraction(0)) if maj == 0 else (Fraction(0), Fraction(1))

    return ExtendedGame(
        alphabets=(("0", "1"),) * n,
        support=support,
        prior=(p,) * len(support),
        receiver_u=tuple(pair(x) for x in support),
        sender_u=tuple(tuple(pair(x) for x in support) for _ in range(n)),
    )


def load_any(text: str):
    """Base or extended game, by the document's ``model`` field."""
    doc = _load_json(text)
    if doc.get("model", "base") == "extended":
        return extended_from_dict(doc)
    from .game import game_from_dict

    return game_from_dict(doc)
