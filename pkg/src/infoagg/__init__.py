"""Coalition-resilient truthful mediators for information aggregation games."""

from .extended import (
    ExtendedGame,
    ExtendedMediatorSpec,
    NotSeparable,
    SeparabilityReport,
    build_order_extended,
    check_separability,
    coalition_preference,
    embed_game,
    eval_mediator_extended,
    majority_game,
    parse_extended_game,
)
from .game import (
    RECEIVER,
    Game,
    GameError,
    Outcome,
    Pref,
    expected_utility,
    parse_game,
    parse_outcome,
    preference,
    receiver_baseline,
)
from .mechanism import (
    MechanismError,
    MediatorSpec,
    eval_mediator,
    lower_pure_set,
    upper_pure_set,
)
from .optimize import FeasibilityReport, Objective, check_outcome, optimize
from .order import (
    DIRECT,
    Mode,
    OrderRelation,
    build_order,
    chain_witness,
    direct_edge,
    prec_holds,
)
from .verify import (
    CapExceeded,
    VerificationReport,
    replay_deviation,
    simulate,
    verify_coalitions,
    verify_receiver,
)

__version__ = "0.1.0"
