"""
When a truthful coalition member profits
========================================

The deviation relation only looks at the senders whose reports change. A
coalition can be larger than that: here sender 2 lies in state w1, where it
does not care, and sender 3 lies in w2, where it does not care. Each lie
moves the recommendation toward what the other, truthful, member wants, so
both end up strictly better off even though the outcome is order-feasible
and the mediator is monotone on every related pair.
"""

from fractions import Fraction as F

from infoagg import Game, MediatorSpec, Mode, Outcome, replay_deviation, verify_coalitions

flat, zero = (F(0), F(0)), (F(1), F(0))
g = Game(
    states=("w1", "w2"),
    prior=(F(1, 2), F(1, 2)),
    n_senders=3,
    receiver_u=(flat, flat),
    sender_u=((flat, flat), (flat, zero), (zero, flat)),
)
spec = MediatorSpec(g, 2, Mode.RESILIENT, Outcome({"w1": "3/4", "w2": "5/8"}))
rep = verify_coalitions(g, 2, Mode.RESILIENT, spec)
cv = rep.coalition_violation
print("coalition:", [i + 1 for i in cv.coalition])
for obs, msgs in cv.deviation.items():
    print(f"  observing {g.states[obs[0]]}: report {[g.states[m] for m in msgs]}")
print("gains:", {i + 1: str(d) for i, d in cv.deltas.items()})
print("replayed:", {i + 1: str(d) for i, d in replay_deviation(spec, cv.coalition, cv.deviation).items()})
