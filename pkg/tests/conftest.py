import pytest

from fct import corpus


@pytest.fixture(scope="session")
def card():
    return corpus.load("card")


@pytest.fixture(scope="session")
def table_one():
    return corpus.load("tableI")


@pytest.fixture(scope="session")
def table_two():
    return corpus.load("tableII")


@pytest.fixture(scope="session")
def table_three():
    return corpus.load("tableIII")


@pytest.fixture(scope="session")
def table_four():
    return corpus.load("tableIV")


@pytest.fixture(scope="session")
def identity2():
    return corpus.load("identity2")


@pytest.fixture(scope="session")
def and2():
    return corpus.load("and2")


@pytest.fixture(scope="session")
def xor2():
    return corpus.load("xor2")


@pytest.fixture(scope="session")
def marginal2():
    return corpus.load("marginal2")
