import os

import pytest

from gameminer.fileformat import load_game_file

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


@pytest.fixture(autouse=True)
def _serial(monkeypatch):
    monkeypatch.delenv("GAME_MINER_THREADS", raising=False)


@pytest.fixture
def cell_phone():
    return load_game_file(fixture_path("cell_phone.game"))


@pytest.fixture
def aggregate_flow():
    return load_game_file(fixture_path("aggregate_flow.game"))


@pytest.fixture
def sequential():
    return load_game_file(fixture_path("sequential.game"))


@pytest.fixture
def dual_offer():
    return load_game_file(fixture_path("dual_offer.game"))
