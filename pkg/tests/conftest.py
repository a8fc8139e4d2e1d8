import pytest

from moddouble.qdilog import ModularParams


@pytest.fixture(scope="session")
def params():
    return ModularParams(0.8)
