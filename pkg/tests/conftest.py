import pytest

from kenmo.registry import load_fixture


def pytest_addoption(parser):
    parser.addoption("--seeds", help="run N different random seeds")


def pytest_generate_tests(metafunc):
    if "rand_seed" in metafunc.fixturenames:
        seeds = metafunc.config.getoption("seeds")
        if seeds:
            metafunc.parametrize("rand_seed", range(int(seeds)))
        else:
            metafunc.parametrize("rand_seed", [421])


# the built-in manifolds cache their curvature, so share them across the session
@pytest.fixture(scope="session")
def m5_case():
    return load_fixture("m5_example")


@pytest.fixture(scope="session")
def m5_analysis(m5_case):
    conn, bundle = m5_case.analysis()
    return m5_case.structure, conn, bundle


@pytest.fixture(scope="session")
def warped_n1_case():
    return load_fixture("warped_flat_n1")


@pytest.fixture(scope="session")
def warped_n2_case():
    return load_fixture("warped_flat_n2")


@pytest.fixture(scope="session")
def flat_rotation_case():
    return load_fixture("flat_rotation_r3")
