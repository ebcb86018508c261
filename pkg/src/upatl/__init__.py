"""Bounded model checking for alternating-time logic with hidden capacities."""

from .checker import Verdict, check_state, eval_path_formula
from .formula import parse_formula, render_formula
from .gamespec import load_game, render_game
from .model import GameStructure, build_game, validate_structure
from .trace import Path, StrategyTree, compatible_assignments, outcomes_bounded

__all__ = [
    "GameStructure",
    "Path",
    "StrategyTree",
    "Verdict",
    "build_game",
    "check_state",
    "compatible_assignments",
    "eval_path_formula",
    "load_game",
    "outcomes_bounded",
    "parse_formula",
    "render_formula",
    "render_game",
    "validate_structure",
]
