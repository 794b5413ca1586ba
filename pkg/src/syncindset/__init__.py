"""Synchronous games, their independent set game reduction, and PVM rounding."""

from .algebra import Tolerance, ValidationError
from .games import SynchronousGame, SyncQuantumStrategy, classical_value, eval_sync_strategy
from .graph import GameGraph, build_game_graph
from .indepset import IndependentSetGame, IndepStrategy, reduction_verifier, sync_loss_indep
from .lifting import backward_lift_approx, backward_lift_perfect, forward_lift, reduce_game
from .luck import LuckParams, luck_value, make_luck_game, sharpness_strategy
from .stability import povm_to_pvm, round_positive_family, round_projection_family, round_subordinate

__version__ = "0.1.0"

__all__ = [
    "GameGraph",
    "IndepStrategy",
    "IndependentSetGame",
    "LuckParams",
    "SyncQuantumStrategy",
    "SynchronousGame",
    "Tolerance",
    "ValidationError",
    "backward_lift_approx",
    "backward_lift_perfect",
    "build_game_graph",
    "classical_value",
    "eval_sync_strategy",
    "forward_lift",
    "luck_value",
    "make_luck_game",
    "povm_to_pvm",
    "reduce_game",
    "reduction_verifier",
    "round_positive_family",
    "round_projection_family",
    "round_subordinate",
    "sharpness_strategy",
    "sync_loss_indep",
]
