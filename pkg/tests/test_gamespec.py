from pathlib import Path as FsPath

import pytest

from upatl.gamespec import (
    GameSpecError,
    bind_game,
    canonical_form,
    load_game,
    parse_game,
    render_game,
)
from upatl.model import validate_structure
from upatl.oracle import GeneratorParams, generate_random_game

GAMES_DIR = FsPath(__file__).parent.parent / "games"


@pytest.fixture(scope="module")
def hand_text():
    return (GAMES_DIR / "hand.game").read_text()


class TestParseAndBind:
    def test_fixture_file_binds(self, hand_text, g_hand):
        game = load_game(hand_text)
        assert game.agent_count == 2
        assert len(game.state_names) == 3
        assert validate_structure(game) == []
        assert canonical_form(game) == canonical_form(g_hand)

    def test_mixed_fixture_file_binds(self, g_mix):
        game = load_game((GAMES_DIR / "hand_mix.game").read_text())
        assert canonical_form(game) == canonical_form(g_mix)

    def test_init_is_bound(self, hand_text):
        game = load_game(hand_text)
        assert game.state_names[game.init_state] == "s0"

    def test_crlf_accepted(self, hand_text):
        game = load_game(hand_text.replace("\n", "\r\n"))
        assert game.agent_count == 2

    def test_missing_transition_row_is_a_bind_error(self, hand_text):
        broken = hand_text.replace("  s1 (watch, serve) -> s0\n", "")
        with pytest.raises(GameSpecError, match="no transition"):
            load_game(broken)

    def test_protocol_starving_a_capacity_is_a_bind_error(self, hand_text):
        broken = hand_text.replace("opp @ s1: serve", "opp @ s1: swingL")
        # The old serve transition also becomes spurious; the capacity
        # diagnostic must still be present and carry the protocol line.
        with pytest.raises(GameSpecError) as err:
            load_game(broken)
        messages = [str(d) for d in err.value.diagnostics]
        assert any("righty" in m and "no action" in m for m in messages)
        protocol_line = next(
            i
            for i, line in enumerate(broken.splitlines(), start=1)
            if line.strip() == "opp @ s1: swingL"
        )
        assert any(d.line == protocol_line for d in err.value.diagnostics)

    def test_unknown_name_has_span(self, hand_text):
        broken = hand_text.replace("opp @ s1: serve", "opp @ s1: smash")
        with pytest.raises(GameSpecError) as err:
            load_game(broken)
        assert "unknown action 'smash'" in str(err.value)
        assert err.value.diagnostics[0].line > 0

    def test_duplicate_section_rejected(self, hand_text):
        with pytest.raises(GameSpecError, match="duplicate section"):
            parse_game(hand_text + "\nstates:\n  s9\n")

    def test_duplicate_state_rejected(self, hand_text):
        with pytest.raises(GameSpecError, match="duplicate state"):
            load_game(hand_text.replace("s0, s1, s2", "s0, s0, s1, s2"))

    def test_missing_section_rejected(self, hand_text):
        broken = "\n".join(
            line
            for line in hand_text.splitlines()
            if line.strip() not in ("labels:", "s0: start", "s1: leftHit", "s2: rightHit")
            and not line.strip().startswith(("s0:", "s1:", "s2:"))
        )
        with pytest.raises(GameSpecError, match="missing section 'labels'"):
            parse_game(broken)

    def test_reserved_prop_rejected(self, hand_text):
        broken = hand_text.replace("s0: start", "s0: start, true")
        with pytest.raises(GameSpecError, match="reserved"):
            load_game(broken)

    def test_syntax_error_has_span(self):
        with pytest.raises(GameSpecError) as err:
            parse_game("game g\nagents:\n  a\nwhat is this\n")
        assert err.value.diagnostics[0].line == 4


class TestRoundTrip:
    def test_fixture_round_trips(self, g_hand, g_mix):
        for game in (g_hand, g_mix):
            again = load_game(render_game(game))
            assert canonical_form(again) == canonical_form(game)

    def test_empty_labels_survive(self, g_hand):
        import dataclasses

        true_only = frozenset({g_hand.true_prop})
        stripped = dataclasses.replace(
            g_hand, labels=(true_only,) * len(g_hand.state_names)
        )
        again = load_game(render_game(stripped))
        assert all(
            again.prop_names[p] == "true"
            for props in again.labels
            for p in props
        )

    def test_generated_games_round_trip(self):
        for seed in range(60):
            params = GeneratorParams(
                seed=seed,
                states=1 + seed % 5,
                agents=1 + seed % 3,
                capacities_per_agent=1 + seed % 2,
            )
            game = generate_random_game(params)
            again = load_game(render_game(game))
            assert canonical_form(again) == canonical_form(game)
