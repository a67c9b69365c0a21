# tests/conftest.py
import logging
from pathlib import Path

import pytest

from src import main as main_module
from src.parser import parse
from src.polynomial import RPoly

FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixture_path():
    """Provides a function resolving a fixture file name to its path.

    Returns:
        The resolver; a missing fixture fails the test.
    """

    def resolve(name: str) -> Path:
        path = FIXTURES_DIR / name
        if not path.is_file():
            pytest.fail(f"Fixture file not found: {path}")
        return path

    return resolve


@pytest.fixture
def ball() -> RPoly:
    """The Siegel-form ball |z1|^2 + |z2|^2."""
    return parse("z1*cz1 + z2*cz2")


@pytest.fixture
def tube() -> RPoly:
    """(Im z1)^2 + (Im z2)^4, invariant under both real translations."""
    return parse("((z1 - cz1)/(2*i))^2 + ((z2 - cz2)/(2*i))^4")


@pytest.fixture
def weighted() -> RPoly:
    """|z1|^6 + |z2|^6 + z1^3 cz2 + cz1^3 z2, whose rotation torus is spanned by (1, 3)."""
    return parse("z1^3*cz1^3 + z2^3*cz2^3 + z1^3*cz2 + cz1^3*z2")


@pytest.fixture(autouse=True)
def _reset_root_logger():
    """Keeps handlers installed by the CLI from leaking between tests."""
    root = logging.getLogger()
    level = root.level
    yield
    while main_module._HANDLERS:
        handler = main_module._HANDLERS.pop()
        root.removeHandler(handler)
        handler.close()
    root.setLevel(level)
