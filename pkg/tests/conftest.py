import pytest

from upatl.fixtures import hand_game, hand_game_mixed


@pytest.fixture(scope="session")
def g_hand():
    return hand_game()


@pytest.fixture(scope="session")
def g_mix():
    return hand_game_mixed()
