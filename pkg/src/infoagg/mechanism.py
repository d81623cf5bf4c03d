"""On-demand evaluation of the resilient mediator for a given outcome.

The mediator is never tabulated: a query profile is compared only against the
truthful inputs (pure profiles, or support profiles in the extended model),
which keeps each evaluation at ``O(m * n)``.
"""

from __future__ import annotations

from fractions import Fraction

from .game import Game, Outcome, Pref
from .optimize import order_violations
from .order import Mode, build_order, check_k, prefs_by_state, quantified


class MechanismError(ValueError):
    pass


class MediatorCore:
    """Mediator over truthful ``node_profiles`` with per-node sender preferences.

    Profiles are tuples of hashable message keys; ``prefs[s][i]`` is sender
    ``i``'s preference at node ``s``.
    """

    def __init__(self, node_profiles, prefs, values, k: int, mode: Mode, strict: bool = True):
        self.strict = strict
        self.node_profiles = [tuple(p) for p in node_profiles]
        self.prefs = prefs
        self.values = list(values)
        self.k = k
        self.mode = mode
        self._node_of = {p: s for s, p in enumerate(self.node_profiles)}

    def node_of(self, profile):
        return self._node_of.get(tuple(profile))

    def pure_sets(self, profile):
        """Node indices above and below a non-truthful ``profile``."""
        above, below = [], []
        for s, (truth, prefs) in enumerate(zip(self.node_profiles, self.prefs)):
            diff = [i for i, (x, y) in enumerate(zip(profile, truth)) if x != y]
            if not diff or len(diff) > self.k:
                continue
            if quantified(prefs, diff, Pref.ZERO, self.mode):
                above.append(s)
            if quantified(prefs, diff, Pref.ONE, self.mode):
                below.append(s)
        return above, below

    def value(self, profile) -> Fraction:
        """Probability of recommending action 0."""
        s = self.node_of(profile)
        if s is not None:
            return self.values[s]
        above, below = self.pure_sets(profile)
        if not above:
            return Fraction(1)
        if not below:
            return Fraction(0)
        lo = min(self.values[s] for s in above)
        hi = max(self.values[s] for s in below)
        if lo < hi and self.strict:
            raise MechanismError(
                f"outcome breaks the order at profile {tuple(profile)}: {lo} < {hi}"
            )
        return (lo + hi) / 2


class MediatorSpec:
    """A base game, coalition bound, mode and an order-feasible outcome.

    Receiver incentive compatibility is deliberately not required here.
    With ``validate=False`` the outcome's order-feasibility is not checked and
    the construction is evaluated as written, which is how a brute-force
    check can exhibit the deviation that an infeasible outcome invites.
    Internally messages are state indices.
    """

    def __init__(self, game: Game, k: int, mode, outcome: Outcome, order=None, validate=True):
        check_k(k, game.n)
        self.game = game
        self.k = k
        self.mode = Mode.parse(mode)
        self.outcome = outcome
        values = outcome.values(game)
        self.order = order if order is not None else build_order(game, k, self.mode)
        bad = order_violations(self.order, outcome)
        self.order_feasible = not bad
        if bad and validate:
            u, v, a, b = bad[0]
            raise MechanismError(
                f"outcome is not order-feasible: o*({u}) = {a} > o*({v}) = {b}"
            )
        pure = [(s,) * game.n for s in range(game.m)]
        self.core = MediatorCore(pure, prefs_by_state(game), values, k, self.mode, strict=validate)

    def keys(self, profile) -> tuple:
        g = self.game
        if len(profile) != g.n:
            raise ValueError(f"profile has {len(profile)} messages for {g.n} senders")
        return tuple(g.state_index(w) for w in profile)

    def value(self, keys) -> Fraction:
        return self.core.value(keys)


def _nonpure(spec, profile) -> tuple:
    keys = spec.keys(profile)
    if spec.core.node_of(keys) is not None:
        raise ValueError("the pure-set queries are defined for non-truthful profiles only")
    return keys


def _labels(spec, nodes) -> set:
    return {spec.game.nodes[s] for s in nodes}


def upper_pure_set(spec, profile) -> set:
    """Truthful inputs lying above ``profile`` (states, or support profiles)."""
    above, _ = spec.core.pure_sets(_nonpure(spec, profile))
    return _labels(spec, above)


def lower_pure_set(spec, profile) -> set:
    """Truthful inputs lying below ``profile``."""
    _, below = spec.core.pure_sets(_nonpure(spec, profile))
    return _labels(spec, below)


def eval_mediator(spec, profile) -> Fraction:
    return spec.value(spec.keys(profile))
