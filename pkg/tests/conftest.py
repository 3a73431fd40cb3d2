import pytest

from rwheat.engine import ParametrixEngine
from rwheat.symbols import hopf_symbols, spherical_symbols


@pytest.fixture(scope="session")
def hopf_table():
    return hopf_symbols()


@pytest.fixture(scope="session")
def spherical_table():
    return spherical_symbols()


# Full (unrestricted) levels through 6; shared by node-level and assembly
# tests.  Levels are computed lazily, so tests that stop at level 2 never
# pay for level 6.
@pytest.fixture(scope="session")
def hopf_engine(hopf_table):
    return ParametrixEngine(hopf_table, max_order=6, restrict_top=False)


@pytest.fixture(scope="session")
def spherical_engine(spherical_table):
    return ParametrixEngine(spherical_table, max_order=6, restrict_top=False)
