import pytest

from cloneops import Domain, OperationSet, enumerate_centraliser, snow_f, snow_t


@pytest.fixture(scope="session")
def d3():
    return Domain(3)


@pytest.fixture(scope="session")
def t3():
    return snow_t(3)


@pytest.fixture(scope="session")
def f3():
    return snow_f(3)


@pytest.fixture(scope="session")
def t3_set(d3, t3):
    return OperationSet.from_operations(d3, [t3])


@pytest.fixture(scope="session")
def unary_centraliser(t3_set):
    return enumerate_centraliser(t3_set, 1)


@pytest.fixture(scope="session")
def binary_centraliser(t3_set):
    return enumerate_centraliser(t3_set, 2)
