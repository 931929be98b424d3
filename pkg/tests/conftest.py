import pathlib

import pytest

from wittlab import localfield

ROOT = pathlib.Path(__file__).resolve().parent.parent
TOWERS = ROOT / "towers"

TOWER_FILES = {
    "q2_i": "q2_i.json",
    "q2_sqrt2": "q2_sqrt2.json",
    "q2_sqrt_minus2": "q2_sqrt_minus2.json",
    "q3": "q3_ramified.json",
}


@pytest.fixture(scope="session")
def towers():
    return {
        name: localfield.load_tower(str(TOWERS / fname))
        for name, fname in TOWER_FILES.items()
    }


@pytest.fixture(scope="session")
def q2_i(towers):
    return towers["q2_i"]


@pytest.fixture(scope="session")
def q2_sqrt2(towers):
    return towers["q2_sqrt2"]


@pytest.fixture(scope="session")
def q2_sqrt_minus2(towers):
    return towers["q2_sqrt_minus2"]


@pytest.fixture(scope="session")
def q3(towers):
    return towers["q3"]
