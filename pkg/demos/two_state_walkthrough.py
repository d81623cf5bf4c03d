"""
Four senders, two states
========================

Which outcomes can a truthful mediator implement when coalitions of up to
``k`` senders may lie together?  This walks the reference two-state game
through every stage: order, feasibility, optimization, the mediator itself,
brute-force verification and playouts.
"""

from pathlib import Path

from infoagg import (
    MediatorSpec,
    Mode,
    Objective,
    Outcome,
    build_order,
    check_outcome,
    eval_mediator,
    optimize,
    parse_game,
    simulate,
    verify_coalitions,
    verify_receiver,
)

g = parse_game((Path(__file__).resolve().parent.parent / "data" / "g1.json").read_text())
print("preferences (row = sender, column = state):")
for i, row in enumerate(g.pref_table()):
    print(f"  sender {i + 1}:", [p.value for p in row])

# %%
# Larger coalitions add order constraints; strong resilience adds more.
for k in (1, 2, 4):
    for mode in Mode:
        order = build_order(g, k, mode)
        print(f"k={k} {mode.value:6s} edges={order.edge_list()}")

# %%
# With k = 2 the only requirement is o*(w1) <= o*(w2), plus receiver-IC.
for o in ({"w1": "1/2", "w2": "1/2"}, {"w1": "7/10", "w2": "1/5"}, {"w1": "1/5", "w2": "7/10"}):
    rep = check_outcome(g, 2, Mode.RESILIENT, Outcome(o))
    print(o, "feasible" if rep.feasible else f"order {rep.violated_order} receiver {rep.violated_receiver}")

# %%
# Best outcomes for the receiver and for sender 1.
for k, obj in ((1, Objective("receiver")), (2, Objective("receiver")), (2, Objective("sender", 0))):
    outcome, value = optimize(g, k, Mode.RESILIENT, obj)
    print(f"k={k} {obj.kind}: value {value} at {[str(x) for x in outcome.values(g)]}")

# %%
# The mediator answers any report profile without tabulating all of them.
spec = MediatorSpec(g, 2, Mode.RESILIENT, Outcome({"w1": "1/5", "w2": "7/10"}))
for prof in (("w1",) * 4, ("w1", "w1", "w2", "w2"), ("w2", "w2", "w2", "w1")):
    print(prof, "->", eval_mediator(spec, prof))

print("senders:", verify_coalitions(g, 2, Mode.RESILIENT, spec).passed)
print("receiver:", verify_receiver(g, spec.outcome).receiver_violation)

# %%
# Honest playouts of the (1/2, 1/2) mediator.
half = MediatorSpec(g, 2, Mode.RESILIENT, Outcome({"w1": "1/2", "w2": "1/2"}))
res = simulate(g, half, rounds=10_000, seed=1)
for w in g.states:
    print(w, res.zeros[w], "/", res.visits[w], "=", float(res.frequency(w)))
