"""
Private signals and the majority game
=====================================

Five senders each see one fair bit; everybody wants the action to match the
majority bit. A sender's view of the action depends on whom it colludes
with, which is exactly what the separability check catches.
"""

from infoagg import (
    Mode,
    Objective,
    check_separability,
    coalition_preference,
    majority_game,
    optimize,
)
from infoagg.optimize import order_for

g = majority_game(5)
x = ("0", "0", "0", "1", "1")

# %%
# Sender 1 alone, and inside two different coalitions, at the same profile.
for K in [(0,), (0, 1, 2), (0, 3, 4)]:
    print("coalition", [i + 1 for i in K], "->", coalition_preference(g, 0, K, x).value)

# %%
for k in (1, 2, 3):
    rep = check_separability(g, k)
    w = rep.witness
    print(f"k={k}: separable={rep.separable}", "" if w is None else
          f"sender {w.sender + 1} at {w.profile}: {w.pref_1.value} vs {w.pref_2.value}")

# %%
# With single-sender coalitions the order is well defined and the LP runs as usual.
order = order_for(g, 1, Mode.RESILIENT)
print(len(order.edges), "edges over", len(g.support), "signal profiles")
outcome, value = optimize(g, 1, Mode.RESILIENT, Objective("receiver"))
print("best receiver utility:", value)
