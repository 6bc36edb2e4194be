import pytest
from hypothesis import HealthCheck, settings

from rfdgraph.fixtures import FIXTURES
from rfdgraph.oracle import random_corpus

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CORPUS_SEED = 2024


@pytest.fixture(scope="session")
def corpus():
    return random_corpus(500, CORPUS_SEED)


@pytest.fixture(scope="session")
def small_corpus(corpus):
    return corpus[:120]


@pytest.fixture
def fx():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
