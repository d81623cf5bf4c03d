"""Deviation relation between mediator inputs and the induced order on states.

A coalition of at most ``k`` senders can move the mediator's input away from
the truthful (pure) profile. ``prec_holds`` is the one-step relation; the
order over states is generated by chains pure -> profile -> pure, and only
chains with at most one intermediate profile need to be examined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .game import Game, Pref

DIRECT = "DIRECT"


class Mode(Enum):
    RESILIENT = "weak"
    STRONG = "strong"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        v = str(value).lower()
        if v in ("weak", "resilient"):
            return cls.RESILIENT
        if v in ("strong",):
            return cls.STRONG
        raise ValueError(f"unknown mode {value!r} (expected weak or strong)")


def quantified(prefs, senders, want: Pref, mode: Mode) -> bool:
    """All (RESILIENT) / at least one (STRONG) of ``prefs[i]`` for ``i in senders`` equal ``want``.

    ``senders`` must be non-empty for the answer to mean anything.
    """
    hits = (prefs[i] is want for i in senders)
    return all(hits) if mode is Mode.RESILIENT else any(hits)


def check_k(k: int, n: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= n:
        raise ValueError(f"coalition bound k must satisfy 1 <= k <= n = {n}, got {k!r}")


def _profile_indices(g: Game, profile) -> tuple[int, ...]:
    if len(profile) != g.n_senders:
        raise ValueError(
            f"profile has {len(profile)} messages for {g.n_senders} senders"
        )
    return tuple(g.state_index(w) for w in profile)


def _pure_state(profile: Sequence[int]) -> Optional[int]:
    first = profile[0]
    return first if all(x == first for x in profile) else None


def prec_indices(prefs_by_state, k: int, mode: Mode, a, b) -> bool:
    """``prec_holds`` on index profiles; ``prefs_by_state[s][i]`` is sender i's preference."""
    diff = [i for i, (x, y) in enumerate(zip(a, b)) if x != y]
    if not diff or len(diff) > k:
        return False
    s = _pure_state(a)
    if s is not None and quantified(prefs_by_state[s], diff, Pref.ONE, mode):
        return True
    t = _pure_state(b)
    return t is not None and quantified(prefs_by_state[t], diff, Pref.ZERO, mode)


def prefs_by_state(g: Game) -> list[list[Pref]]:
    table = g.pref_table()
    return [[table[i][s] for i in range(g.n)] for s in range(g.m)]


def prec_holds(g: Game, k: int, mode, a, b) -> bool:
    """Whether input ``a`` precedes input ``b`` under coalitions of size at most ``k``."""
    mode = Mode.parse(mode)
    ai, bi = _profile_indices(g, a), _profile_indices(g, b)
    if ai == bi:
        raise ValueError("prec_holds needs two distinct profiles")
    return prec_indices(prefs_by_state(g), k, mode, ai, bi)


def direct_edge(g: Game, k: int, mode, w, w2) -> bool:
    mode = Mode.parse(mode)
    s, t = g.state_index(w), g.state_index(w2)
    if s == t:
        raise ValueError("direct_edge needs two distinct states")
    if k != g.n:
        return False
    by_state = prefs_by_state(g)
    everyone = range(g.n)
    return quantified(by_state[s], everyone, Pref.ONE, mode) or quantified(
        by_state[t], everyone, Pref.ZERO, mode
    )


def _resilient_witness(g: Game, k: int, s: int, t: int) -> Optional[list[int]]:
    table = g.pref_table()
    stay, free, leave, blockers = [], [], [], []
    for i in range(g.n):
        may_leave_s = table[i][s] is Pref.ONE
        may_leave_t = table[i][t] is Pref.ZERO
        if may_leave_s and may_leave_t:
            free.append(i)
        elif may_leave_s:
            leave.append(i)  # must report t
        elif may_leave_t:
            stay.append(i)  # must report s
        else:
            blockers.append(i)
    n = g.n
    if blockers or 2 * k < n or len(stay) > k or len(leave) > k:
        return None
    to_s = max(0, min(len(free), k - len(stay)))
    profile = [0] * n
    for i in stay:
        profile[i] = s
    for i in leave:
        profile[i] = t
    for pos, i in enumerate(free):
        profile[i] = s if pos < to_s else t
    if all(x == s for x in profile):
        # only reachable when k = n; one free sender can still move
        if not free:
            return None
        profile[free[-1]] = t
    elif all(x == t for x in profile):
        return None
    return profile


def _strong_witness(g: Game, k: int, s: int, t: int) -> Optional[list[int]]:
    table = g.pref_table()
    n = g.n
    ups = [i for i in range(n) if table[i][s] is Pref.ONE]
    downs = [j for j in range(n) if table[j][t] is Pref.ZERO]
    if not ups or not downs:
        return None

    def fill(fixed: dict[int, int], budget_t: int) -> list[int]:
        # lowest-indexed remaining senders go to t first
        profile, used = [0] * n, 0
        for i in range(n):
            if i in fixed:
                profile[i] = fixed[i]
            elif used < budget_t:
                profile[i] = t
                used += 1
            else:
                profile[i] = s
        return profile

    if n <= 2 * k:
        for i in ups:
            for j in downs:
                if i != j:
                    rest = n - 2
                    return fill({i: t, j: s}, min(rest, k - 1))
    # A third state lets one sender sit outside both pure profiles at once.
    if g.m >= 3 and n + 1 <= 2 * k:
        both = [i for i in ups if i in downs]
        if both:
            other = next(u for u in range(g.m) if u not in (s, t))
            return fill({both[0]: other}, min(n - 1, k - 1))
    return None


def chain_witness(g: Game, k: int, mode, w, w2) -> Optional[tuple[str, ...]]:
    """An input strictly between the two pure inputs, or ``None`` if none exists."""
    mode = Mode.parse(mode)
    s, t = g.state_index(w), g.state_index(w2)
    if s == t:
        raise ValueError("chain_witness needs two distinct states")
    if mode is Mode.RESILIENT:
        profile = _resilient_witness(g, k, s, t)
    else:
        profile = _strong_witness(g, k, s, t)
    if profile is None:
        return None
    return tuple(g.states[x] for x in profile)


def transitive_closure(size: int, edges) -> list[list[bool]]:
    """Reflexive-transitive closure of index pairs (Warshall)."""
    reach = [[i == j for j in range(size)] for i in range(size)]
    for a, b in edges:
        reach[a][b] = True
    for mid in range(size):
        row_mid = reach[mid]
        for a in range(size):
            if reach[a][mid]:
                row_a = reach[a]
                for b in range(size):
                    if row_mid[b]:
                        row_a[b] = True
    return reach


@dataclass(frozen=True)
class OrderRelation:
    """Edges ``(u, v)`` mean the constraint ``o*(u) <= o*(v)``; ``reach`` is their closure."""

    nodes: tuple
    k: int
    mode: Mode
    edges: frozenset
    reach: tuple
    witnesses: dict = field(compare=False)

    def index(self, node) -> int:
        return self.nodes.index(node)

    def leq(self, u, v) -> bool:
        return self.reach[self.index(u)][self.index(v)]

    def edge_list(self) -> list:
        """Edges in row-major node order."""
        pos = {w: i for i, w in enumerate(self.nodes)}
        return sorted(self.edges, key=lambda e: (pos[e[0]], pos[e[1]]))

    def reach_pairs(self) -> list:
        """All ``(u, v)`` with ``u != v`` and ``u`` below ``v``."""
        return [
            (u, v)
            for i, u in enumerate(self.nodes)
            for j, v in enumerate(self.nodes)
            if i != j and self.reach[i][j]
        ]


def assemble_order(nodes, k, mode, found: dict) -> OrderRelation:
    """Build an :class:`OrderRelation` from ``{(i, j): witness}`` over node indices."""
    idx_edges = sorted(found)
    reach = transitive_closure(len(nodes), idx_edges)
    return OrderRelation(
        nodes=tuple(nodes),
        k=k,
        mode=mode,
        edges=frozenset((nodes[i], nodes[j]) for i, j in idx_edges),
        reach=tuple(tuple(row) for row in reach),
        witnesses={(nodes[i], nodes[j]): found[(i, j)] for i, j in idx_edges},
    )


def build_order(g: Game, k: int, mode) -> OrderRelation:
    mode = Mode.parse(mode)
    check_k(k, g.n)
    found = {}
    for s in range(g.m):
        for t in range(g.m):
            if s == t:
                continue
            if direct_edge(g, k, mode, s, t):
                found[(s, t)] = DIRECT
                continue
            witness = chain_witness(g, k, mode, s, t)
            if witness is not None:
                found[(s, t)] = witness
    return assemble_order(g.states, k, mode, found)
