import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import coi_family, fresh_platform  # noqa: E402


@pytest.fixture()
def platform():
    return fresh_platform()


@pytest.fixture(scope="session")
def family():
    return coi_family()
