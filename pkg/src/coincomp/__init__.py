"""Cheat-sensitive coin flipping: composition analysis and exact game solves.

The package has three layers.  `game_tree` and `cheat_model` define the
objects: binary outcome trees and the parametric cheating channels that can
be attached to every flip.  `composer` and `walk` do the analysis: the
leading-order adversary optimum under serial composition, an exact
brute-force oracle on small trees, and the absorbing random-walk game solved
by policy iteration on tridiagonal systems.  `simulate` cross-checks both
with deterministic Monte Carlo, and `cli` exposes it all as a command-line
tool.
"""

from .cheat_model import PRIME, STD, CheatModel, OutcomeTriple, dominates, parse_model_string
from .composer import (
    CompositionResult,
    a_new_of_b,
    brute_force_min_pc,
    derivative_in_b,
    exact_outcome,
    leading_order,
)
from .game_tree import (
    Flip,
    GameTree,
    Leaf,
    TreeParseError,
    annotate,
    gen_best_of,
    gen_full,
    gen_random_fair,
    lemma_sum,
    parse_tree,
    serialize_tree,
)
from .simulate import SimReport, simulate_tree, simulate_walk
from .walk import (
    WalkGame,
    WalkSolution,
    brute_force_optimize,
    evaluate_policy,
    honest_policy,
    optimize,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "PRIME",
    "STD",
    "CheatModel",
    "CompositionResult",
    "Flip",
    "GameTree",
    "Leaf",
    "OutcomeTriple",
    "SimReport",
    "TreeParseError",
    "WalkGame",
    "WalkSolution",
    "a_new_of_b",
    "annotate",
    "brute_force_min_pc",
    "brute_force_optimize",
    "derivative_in_b",
    "dominates",
    "evaluate_policy",
    "exact_outcome",
    "gen_best_of",
    "gen_full",
    "gen_random_fair",
    "honest_policy",
    "lemma_sum",
    "leading_order",
    "optimize",
    "parse_model_string",
    "parse_tree",
    "serialize_tree",
    "simulate_tree",
    "simulate_walk",
    "sweep",
    "__version__",
]
