"""Canonical hand-built games used across the test suite and the docs.

The serve/return game: an observer (``obs``) can only watch; the opponent
(``opp``) is secretly left- or right-handed.  Both handedness capacities can
serve, but each has its own swing, so a swing reveals the capacity while a
serve keeps it hidden.
"""

from __future__ import annotations

from .model import GameStructure, build_game


def hand_game() -> GameStructure:
    """Serve/return game where swings are only available in the start state."""
    return build_game(
        name="hand",
        agents=["obs", "opp"],
        capacities={"obs": ["normal"], "opp": ["lefty", "righty"]},
        actions={
            "normal": ["watch"],
            "lefty": ["serve", "swingL"],
            "righty": ["serve", "swingR"],
        },
        states=["s0", "s1", "s2"],
        labels={"s0": ["start"], "s1": ["leftHit"], "s2": ["rightHit"]},
        protocol={
            ("obs", "s0"): ["watch"],
            ("obs", "s1"): ["watch"],
            ("obs", "s2"): ["watch"],
            ("opp", "s0"): ["serve", "swingL", "swingR"],
            ("opp", "s1"): ["serve"],
            ("opp", "s2"): ["serve"],
        },
        transitions={
            ("s0", ("watch", "serve")): "s0",
            ("s0", ("watch", "swingL")): "s1",
            ("s0", ("watch", "swingR")): "s2",
            ("s1", ("watch", "serve")): "s0",
            ("s2", ("watch", "serve")): "s0",
        },
        init="s0",
    )


def hand_game_mixed() -> GameStructure:
    """Variant where both swings stay available after a left hit.

    Playing swingL and then swingR is possible move-by-move but compatible
    with no single capacity, so capacity filtering can empty out mid-path.
    """
    return build_game(
        name="hand_mix",
        agents=["obs", "opp"],
        capacities={"obs": ["normal"], "opp": ["lefty", "righty"]},
        actions={
            "normal": ["watch"],
            "lefty": ["serve", "swingL"],
            "righty": ["serve", "swingR"],
        },
        states=["s0", "s1", "s2"],
        labels={"s0": ["start"], "s1": ["leftHit"], "s2": ["rightHit"]},
        protocol={
            ("obs", "s0"): ["watch"],
            ("obs", "s1"): ["watch"],
            ("obs", "s2"): ["watch"],
            ("opp", "s0"): ["serve", "swingL", "swingR"],
            ("opp", "s1"): ["serve", "swingL", "swingR"],
            ("opp", "s2"): ["serve"],
        },
        transitions={
            ("s0", ("watch", "serve")): "s0",
            ("s0", ("watch", "swingL")): "s1",
            ("s0", ("watch", "swingR")): "s2",
            ("s1", ("watch", "serve")): "s0",
            ("s1", ("watch", "swingL")): "s1",
            ("s1", ("watch", "swingR")): "s2",
            ("s2", ("watch", "serve")): "s0",
        },
        init="s0",
    )
