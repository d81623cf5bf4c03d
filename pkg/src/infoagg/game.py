"""Information aggregation games over a finite state space with binary actions.

All probabilities and utilities are held as :class:`fractions.Fraction` so that
every comparison downstream (order constraints, receiver incentive checks,
coalition deviations) is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

Rational = Fraction

RECEIVER = "receiver"


class GameError(ValueError):
    """Raised for malformed or inconsistent game / outcome descriptions."""


class Pref(Enum):
    ZERO = "ZERO"
    ONE = "ONE"
    INDIFFERENT = "INDIFFERENT"

    def flipped(self) -> "Pref":
        if self is Pref.ZERO:
            return Pref.ONE
        if self is Pref.ONE:
            return Pref.ZERO
        return self


def compare_pair(u0, u1) -> Pref:
    if u0 > u1:
        return Pref.ZERO
    if u1 > u0:
        return Pref.ONE
    return Pref.INDIFFERENT


def to_rational(value) -> Fraction:
    """Exact rational from "p/q", a decimal string or an int.

    Floats are routed through ``repr`` so ``0.1`` means one tenth, not the
    nearest binary double.
    """
    if isinstance(value, bool):
        raise GameError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        value = repr(value)
    if not isinstance(value, str):
        raise GameError(f"not a number: {value!r}")
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise GameError(f"bad rational literal {value!r}") from exc


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def _pair(raw, where: str) -> tuple[Fraction, Fraction]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise GameError(f"{where}: expected a pair [u(.,0), u(.,1)], got {raw!r}")
    return to_rational(raw[0]), to_rational(raw[1])


def check_prior(prior: Sequence[Fraction], what: str = "prior") -> None:
    for q in prior:
        if q <= 0:
            raise GameError(f"{what} entries must be strictly positive, got {q}")
    total = sum(prior, Fraction(0))
    if total != 1:
        raise GameError(f"{what} sums to {total} ≠ 1")


@dataclass(frozen=True)
class Game:
    """Base game: every sender observes the realized state.

    ``receiver_u[s]`` and ``sender_u[i][s]`` are ``(u(., s, 0), u(., s, 1))``
    with ``s`` a state index. Senders are indexed from 0.
    """

    states: tuple[str, ...]
    prior: tuple[Fraction, ...]
    n_senders: int
    receiver_u: tuple[tuple[Fraction, Fraction], ...]
    sender_u: tuple[tuple[tuple[Fraction, Fraction], ...], ...]

    def __post_init__(self):
        m = len(self.states)
        if m < 1:
            raise GameError("a game needs at least one state")
        if len(set(self.states)) != m:
            raise GameError("state identifiers must be unique")
        if self.n_senders < 1:
            raise GameError("a game needs at least one sender")
        if len(self.prior) != m:
            raise GameError(f"prior has {len(self.prior)} entries for {m} states")
        check_prior(self.prior)
        if len(self.receiver_u) != m:
            raise GameError("receiver utility must cover every state")
        if len(self.sender_u) != self.n_senders:
            raise GameError(
                f"{self.n_senders} senders declared but {len(self.sender_u)} "
                "sender utility tables given"
            )
        for i, row in enumerate(self.sender_u):
            if len(row) != m:
                raise GameError(f"sender {i + 1} utility must cover every state")
        prefs = tuple(
            tuple(compare_pair(*row[s]) for s in range(m)) for row in self.sender_u
        )
        object.__setattr__(self, "_prefs", prefs)
        object.__setattr__(self, "_index", {w: s for s, w in enumerate(self.states)})

    @property
    def m(self) -> int:
        return len(self.states)

    @property
    def n(self) -> int:
        return self.n_senders

    # Shared surface with ExtendedGame: "nodes" are the points carrying
    # outcome variables (states here, support profiles there).
    @property
    def nodes(self) -> tuple[str, ...]:
        return self.states

    def state_index(self, state) -> int:
        if isinstance(state, int) and not isinstance(state, bool):
            if not 0 <= state < self.m:
                raise IndexError(f"state index {state} out of range")
            return state
        try:
            return self._index[state]
        except KeyError:
            raise IndexError(f"unknown state {state!r}") from None

    node_index = state_index

    def pref_table(self) -> tuple[tuple[Pref, ...], ...]:
        """``pref_table()[i][s]``: strict preference of sender ``i`` at state ``s``."""
        return self._prefs

    def utility(self, player, s: int) -> tuple[Fraction, Fraction]:
        if player == RECEIVER:
            return self.receiver_u[s]
        if not 0 <= player < self.n_senders:
            raise IndexError(f"sender index {player} out of range")
        return self.sender_u[player][s]

    def players(self) -> list:
        return list(range(self.n_senders)) + [RECEIVER]


@dataclass(frozen=True)
class Outcome:
    """``o_star[node]`` is the probability that action 0 is played there."""

    o_star: Mapping

    def __post_init__(self):
        clean = {}
        for key, q in self.o_star.items():
            q = to_rational(q)
            if not 0 <= q <= 1:
                raise GameError(f"o*({key}) = {q} is outside [0, 1]")
            clean[key] = q
        object.__setattr__(self, "o_star", clean)

    def __getitem__(self, key) -> Fraction:
        return self.o_star[key]

    def values(self, game) -> list[Fraction]:
        """Values in the game's node order; checks the key set matches."""
        keys = set(self.o_star)
        if keys != set(game.nodes):
            missing = [w for w in game.nodes if w not in keys]
            extra = [w for w in keys if w not in set(game.nodes)]
            raise GameError(
                f"outcome does not match the game's states (missing {missing}, extra {extra})"
            )
        return [self.o_star[w] for w in game.nodes]

    @classmethod
    def from_values(cls, game, values) -> "Outcome":
        values = list(values)
        if len(values) != len(game.nodes):
            raise GameError("one outcome value per state is required")
        return cls(dict(zip(game.nodes, values)))

    @classmethod
    def constant(cls, game, q) -> "Outcome":
        return cls.from_values(game, [q] * len(game.nodes))


# ---------------------------------------------------------------- primitives


def preference(g: Game, i: int, state) -> Pref:
    if not 0 <= i < g.n_senders:
        raise IndexError(f"sender index {i} out of range")
    return g.pref_table()[i][g.state_index(state)]


def receiver_baseline(g, a: int) -> Fraction:
    """Receiver's expected utility from ignoring the mediator and always playing ``a``."""
    if a not in (0, 1):
        raise ValueError(f"action must be 0 or 1, got {a!r}")
    return sum((p * u[a] for p, u in zip(g.prior, g.receiver_u)), Fraction(0))


def expected_utility(g, player, o: Outcome) -> Fraction:
    xs = o.values(g)
    total = Fraction(0)
    for s, (p, x) in enumerate(zip(g.prior, xs)):
        u0, u1 = g.utility(player, s)
        total += p * (x * u0 + (1 - x) * u1)
    return total


# ---------------------------------------------------------------- file format


def _load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameError(f"malformed document: {exc}") from exc
    if not isinstance(doc, dict):
        raise GameError("malformed document: top level must be an object")
    return doc


def game_from_dict(doc: dict) -> Game:
    model = doc.get("model", "base")
    if model != "base":
        raise GameError(f"expected a base game, got model {model!r}")
    try:
        states = tuple(str(w) for w in doc["states"])
        prior = tuple(to_rational(q) for q in doc["prior"])
        n = doc["senders"]
        recv = doc["receiver_utility"]
        senders = doc["sender_utility"]
    except KeyError as exc:
        raise GameError(f"malformed document: missing field {exc.args[0]!r}") from None
    except TypeError as exc:
        raise GameError(f"malformed document: {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise GameError("'senders' must be an integer")
    if len(set(states)) != len(states):
        raise GameError("state identifiers must be unique")
    if not isinstance(senders, list) or len(senders) != n:
        got = len(senders) if isinstance(senders, list) else senders
        raise GameError(f"'senders' is {n} but sender_utility has {got} entries")

    def table(raw, who):
        if not isinstance(raw, dict):
            raise GameError(f"{who}: utility table must map state -> pair")
        unknown = set(raw) - set(states)
        if unknown:
            raise GameError(f"{who}: unknown states {sorted(unknown)}")
        try:
            return tuple(_pair(raw[w], f"{who} at {w}") for w in states)
        except KeyError as exc:
            raise GameError(f"{who}: no utility for state {exc.args[0]!r}") from None

    return Game(
        states=states,
        prior=prior,
        n_senders=n,
        receiver_u=table(recv, "receiver"),
        sender_u=tuple(table(row, f"sender {i + 1}") for i, row in enumerate(senders)),
    )


def parse_game(text: str) -> Game:
    return game_from_dict(_load_json(text))


def game_to_dict(g: Game) -> dict:
    f = format_rational
    return {
        "model": "base",
        "states": list(g.states),
        "prior": [f(q) for q in g.prior],
        "senders": g.n_senders,
        "receiver_utility": {
            w: [f(u0), f(u1)] for w, (u0, u1) in zip(g.states, g.receiver_u)
        },
        "sender_utility": [
            {w: [f(u0), f(u1)] for w, (u0, u1) in zip(g.states, row)}
            for row in g.sender_u
        ],
    }


def parse_outcome(text: str, game=None) -> Outcome:
    doc = _load_json(text)
    raw = doc.get("o_star")
    if not isinstance(raw, dict):
        raise GameError("outcome document needs an 'o_star' object")
    if game is not None and hasattr(game, "parse_node"):
        raw = {game.parse_node(key): q for key, q in raw.items()}
    o = Outcome(raw)
    if game is not None:
        o.values(game)
    return o


def outcome_to_dict(o: Outcome, game=None) -> dict:
    keys = game.nodes if game is not None else list(o.o_star)
    label = getattr(game, "node_label", str)
    return {"o_star": {label(w): format_rational(o[w]) for w in keys}}
