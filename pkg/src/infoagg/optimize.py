"""Implementability checks and optimal implementable outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .game import RECEIVER, Outcome, expected_utility, receiver_baseline
from .order import Mode, OrderRelation, build_order
from .simplex import Infeasible, maximize


def order_for(game, k: int, mode) -> OrderRelation:
    """Order relation for either a base or an extended game."""
    from .extended import ExtendedGame, build_order_extended

    if isinstance(game, ExtendedGame):
        return build_order_extended(game, k, mode)
    return build_order(game, k, mode)


@dataclass
class FeasibilityReport:
    feasible: bool
    violated_order: list = field(default_factory=list)
    violated_receiver: list = field(default_factory=list)


def order_violations(order: OrderRelation, o: Outcome) -> list:
    return [(u, v, o[u], o[v]) for u, v in order.reach_pairs() if o[u] > o[v]]


def receiver_violations(game, o: Outcome) -> list:
    er = expected_utility(game, RECEIVER, o)
    out = []
    for a in (0, 1):
        ua = receiver_baseline(game, a)
        if er < ua:
            out.append((a, er, ua))
    return out


def check_outcome(game, k: int, mode, o: Outcome, order: Optional[OrderRelation] = None):
    o.values(game)
    if order is None:
        order = order_for(game, k, Mode.parse(mode))
    vo = order_violations(order, o)
    vr = receiver_violations(game, o)
    return FeasibilityReport(feasible=not vo and not vr, violated_order=vo, violated_receiver=vr)


@dataclass(frozen=True)
class Objective:
    """What to maximize: ``receiver``, ``sender`` (0-based ``sender``) or weighted ``welfare``.

    Welfare weights list the senders in order followed by the receiver; ``None``
    means weight 1 for everyone.
    """

    kind: str = "receiver"
    sender: Optional[int] = None
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("receiver", "sender", "welfare"):
            raise ValueError(f"unknown objective {self.kind!r}")
        if self.kind == "sender" and self.sender is None:
            raise ValueError("sender objective needs a sender index")
        if self.weights is not None:
            w = tuple(Fraction(x) for x in self.weights)
            if any(x < 0 for x in w) or not any(w):
                raise ValueError("welfare weights must be nonnegative and not all zero")
            object.__setattr__(self, "weights", w)

    @classmethod
    def parse(cls, text: str) -> "Objective":
        """``receiver``, ``sender:i`` (1-based) or ``welfare[:w1,...,wn,wr]``."""
        head, _, rest = text.partition(":")
        if head == "receiver" and not rest:
            return cls("receiver")
        if head == "sender":
            try:
                i = int(rest)
            except ValueError:
                raise ValueError(f"bad sender objective {text!r}") from None
            if i < 1:
                raise ValueError("senders are numbered from 1")
            return cls("sender", sender=i - 1)
        if head == "welfare":
            if not rest:
                return cls("welfare")
            from .game import to_rational

            return cls("welfare", weights=tuple(to_rational(x) for x in rest.split(",")))
        raise ValueError(f"unknown objective {text!r}")

    def player_weights(self, game) -> dict:
        n = game.n
        if self.kind == "receiver":
            return {RECEIVER: Fraction(1)}
        if self.kind == "sender":
            if not 0 <= self.sender < n:
                raise IndexError(f"sender index {self.sender} out of range")
            return {self.sender: Fraction(1)}
        if self.weights is None:
            return {p: Fraction(1) for p in game.players()}
        if len(self.weights) != n + 1:
            raise ValueError(f"welfare needs {n + 1} weights (senders then receiver)")
        return dict(zip(list(range(n)) + [RECEIVER], self.weights))


def linear_form(game, weights: dict):
    """``(const, coeffs)`` with objective ``const + sum(coeffs[s] * x_s)``."""
    size = len(game.nodes)
    const = Fraction(0)
    coeffs = [Fraction(0)] * size
    for player, w in weights.items():
        if w == 0:
            continue
        for s in range(size):
            u0, u1 = game.utility(player, s)
            p = game.prior[s]
            const += w * p * u1
            coeffs[s] += w * p * (u0 - u1)
    return const, coeffs


def lp_constraints(game, order: OrderRelation):
    """Rows ``(A, b)`` of ``A x <= b`` for order, receiver-IC and ``x <= 1``."""
    size = len(game.nodes)
    pos = {w: i for i, w in enumerate(order.nodes)}
    A, b = [], []
    for u, v in order.edge_list():
        row = [Fraction(0)] * size
        row[pos[u]] += 1
        row[pos[v]] -= 1
        A.append(row)
        b.append(Fraction(0))
    const, coeffs = linear_form(game, {RECEIVER: Fraction(1)})
    for a in (0, 1):
        # const + coeffs.x >= U_a
        A.append([-c for c in coeffs])
        b.append(const - receiver_baseline(game, a))
    for s in range(size):
        row = [Fraction(0)] * size
        row[s] = Fraction(1)
        A.append(row)
        b.append(Fraction(1))
    return A, b


def optimize(game, k: int, mode, obj: Objective = Objective()):
    """Best implementable outcome for ``obj``; returns ``(Outcome, value)``."""
    mode = Mode.parse(mode)
    order = order_for(game, k, mode)
    const, coeffs = linear_form(game, obj.player_weights(game))
    A, b = lp_constraints(game, order)
    try:
        res = maximize(coeffs, A, b)
    except Infeasible as exc:
        # constant outcomes are always feasible, so this is a solver fault
        raise RuntimeError("internal error: outcome LP reported infeasible") from exc
    outcome = Outcome.from_values(game, res.x)
    return outcome, const + res.value
