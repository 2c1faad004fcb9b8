"""Shared fixtures."""
import random

import pytest

from app.fixtures import build_login_screen
from app.model import ScreenPair


@pytest.fixture(scope="session")
def login_screen() -> ScreenPair:
    return build_login_screen()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture(autouse=True)
def _isolated_environment(monkeypatch, tmp_path):
    """Keep the developer's environment and .env file out of the tests."""
    for name in (
        "GUI_VERIFY_CONFIG",
        "GUI_VERIFY_LOG_LEVEL",
        "GUI_VERIFY_JOBS",
        "GUI_VERIFY_SOURCE_DATE_EPOCH",
        "SOURCE_DATE_EPOCH",
    ):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
