import pathlib
import sys

import pytest

from lapflex import TABLE_I_GEOMETRY

# Make the independent oracle scripts importable by the tests that compare
# library output against them.
sys.path.insert(0, str(pathlib.Path(__file__).parent / "oracles"))


@pytest.fixture
def geom():
    return TABLE_I_GEOMETRY
