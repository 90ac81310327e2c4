import os

import pytest

from causalogic.modeltext import load_model

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


@pytest.fixture
def unique_cycle():
    return load_model(fixture_path("unique_cycle.model"))


@pytest.fixture
def copy_cycle():
    return load_model(fixture_path("copy_cycle.model"))


@pytest.fixture
def ring3():
    return load_model(fixture_path("ring3.model"))


@pytest.fixture
def no_fixpoint():
    return load_model(fixture_path("no_fixpoint.model"))


@pytest.fixture
def chain():
    return load_model(fixture_path("chain.model"))


@pytest.fixture
def exo_pair():
    return load_model(fixture_path("exo_pair.model"))
