import pytest

from glassbench.topology import build_chimera, build_pegasus


@pytest.fixture(scope="session")
def chimera_16():
    return build_chimera(16, 16, 4)


@pytest.fixture(scope="session")
def chimera_44():
    return build_chimera(4, 4, 4)


@pytest.fixture(scope="session")
def chimera_88():
    return build_chimera(8, 8, 4)


@pytest.fixture(scope="session")
def pegasus_16():
    return build_pegasus(16)


@pytest.fixture(scope="session")
def pegasus_4():
    return build_pegasus(4)
