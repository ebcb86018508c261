import dataclasses

import pytest

from upatl import model
from upatl.model import (
    CAPACITY_MISSING_ACTION,
    MISSING_TRANSITION,
    PROTOCOL_OUTSIDE_CAPACITIES,
    SPURIOUS_TRANSITION,
    MissingTransitionError,
    ProtocolError,
    validate_structure,
)


def names(game, ids):
    return {game.action_names[x] for x in ids}


def replace_protocol(game, agent_name, state_name, action_names):
    """Copy of ``game`` with one protocol cell replaced (no transition fixup)."""
    a = game.agent_names.index(agent_name)
    q = game.state_names.index(state_name)
    acts = frozenset(game.action_names.index(x) for x in action_names)
    rows = [list(row) for row in game.protocols]
    rows[a][q] = acts
    return dataclasses.replace(
        game, protocols=tuple(tuple(row) for row in rows)
    )


class TestValidation:
    def test_fixtures_are_clean(self, g_hand, g_mix):
        assert validate_structure(g_hand) == []
        assert validate_structure(g_mix) == []

    def test_emptied_capacity_intersection_is_reported(self, g_hand):
        # d(opp, s1) = {swingL}: the righty capacity loses its only move there.
        mutant = replace_protocol(g_hand, "opp", "s1", ["swingL"])
        report = validate_structure(mutant)
        righty = g_hand.capacity_names.index("righty")
        s1 = g_hand.state_names.index("s1")
        assert any(
            v.kind == CAPACITY_MISSING_ACTION
            and v.capacity == righty
            and v.state == s1
            for v in report
        )

    def test_deleted_transition_is_reported(self, g_hand):
        key = (
            g_hand.state_names.index("s0"),
            (
                g_hand.action_names.index("watch"),
                g_hand.action_names.index("serve"),
            ),
        )
        trans = dict(g_hand.transitions)
        del trans[key]
        mutant = dataclasses.replace(g_hand, transitions=trans)
        report = validate_structure(mutant)
        assert [v.kind for v in report] == [MISSING_TRANSITION]
        assert report[0].joint == key[1]

    def test_action_outside_capacities_is_reported(self, g_hand):
        # serve is an action of the game but of none of obs's capacities.
        mutant = replace_protocol(g_hand, "obs", "s1", ["watch", "serve"])
        report = validate_structure(mutant)
        kinds = {v.kind for v in report}
        assert PROTOCOL_OUTSIDE_CAPACITIES in kinds
        # The protocol change also makes new joint actions available.
        assert MISSING_TRANSITION in kinds

    def test_spurious_transition_is_reported(self, g_hand):
        trans = dict(g_hand.transitions)
        s1 = g_hand.state_names.index("s1")
        swing = (
            g_hand.action_names.index("watch"),
            g_hand.action_names.index("swingL"),
        )
        trans[(s1, swing)] = s1
        mutant = dataclasses.replace(g_hand, transitions=trans)
        report = validate_structure(mutant)
        assert [v.kind for v in report] == [SPURIOUS_TRANSITION]

    def test_empty_capacity_set_is_reported(self, g_hand):
        mutant = dataclasses.replace(
            g_hand,
            agent_capacities=(frozenset(), g_hand.agent_capacities[1]),
        )
        report = validate_structure(mutant)
        assert any(v.kind == model.EMPTY_CAPACITIES and v.agent == 0 for v in report)


class TestMoves:
    def test_joint_actions_product(self, g_hand):
        s0 = g_hand.state_names.index("s0")
        got = {
            tuple(g_hand.action_names[x] for x in joint)
            for joint in g_hand.joint_actions(s0)
        }
        assert got == {
            ("watch", "serve"),
            ("watch", "swingL"),
            ("watch", "swingR"),
        }

    def test_joint_actions_singleton(self, g_hand):
        s1 = g_hand.state_names.index("s1")
        got = g_hand.joint_actions(s1)
        assert len(got) == 1

    def test_joint_actions_unknown_state(self, g_hand):
        with pytest.raises(ValueError):
            g_hand.joint_actions(17)

    def test_all_singleton_protocols_mean_one_joint_action(self, g_hand):
        for q in (1, 2):
            assert len(g_hand.joint_actions(q)) == 1

    def test_successor_follows_table(self, g_hand):
        s0 = g_hand.state_names.index("s0")
        s1 = g_hand.state_names.index("s1")
        watch = g_hand.action_names.index("watch")
        swing_l = g_hand.action_names.index("swingL")
        serve = g_hand.action_names.index("serve")
        assert g_hand.successor(s0, (watch, swing_l)) == s1
        assert g_hand.successor(s1, (watch, serve)) == s0

    def test_successor_rejects_unavailable_action(self, g_hand):
        s0 = g_hand.state_names.index("s0")
        serve = g_hand.action_names.index("serve")
        # serve is a real action, but not one obs may play.
        with pytest.raises(ProtocolError):
            g_hand.successor(s0, (serve, serve))

    def test_missing_transition_is_a_distinct_error(self, g_hand):
        key = (
            g_hand.state_names.index("s1"),
            (
                g_hand.action_names.index("watch"),
                g_hand.action_names.index("serve"),
            ),
        )
        trans = dict(g_hand.transitions)
        del trans[key]
        mutant = dataclasses.replace(g_hand, transitions=trans)
        with pytest.raises(MissingTransitionError):
            mutant.successor(*key)

    def test_progression_gives_total_successors(self, g_hand, g_mix):
        for game in (g_hand, g_mix):
            for q in game.states:
                joints = game.joint_actions(q)
                assert joints
                for joint in joints:
                    game.successor(q, joint)


class TestConstruction:
    def test_reserved_prop_labels_every_state(self, g_hand):
        true_id = g_hand.true_prop
        assert all(true_id in props for props in g_hand.labels)

    def test_reserved_prop_name_rejected_in_labels(self):
        with pytest.raises(ValueError, match="reserved"):
            model.build_game(
                name="bad",
                agents=["a"],
                capacities={"a": ["c"]},
                actions={"c": ["x"]},
                states=["q"],
                labels={"q": ["true"]},
                protocol={("a", "q"): ["x"]},
                transitions={("q", ("x",)): "q"},
            )
