import pytest
from hypothesis import settings

from affinefourier.algebraic import IntPolynomial, certify_pisot

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def phi():
    return certify_pisot(IntPolynomial.parse("x^2 - x - 1"))


@pytest.fixture(scope="session")
def silver():
    return certify_pisot(IntPolynomial.parse("x^2 - 2x - 1"))


@pytest.fixture(scope="session")
def plastic():
    return certify_pisot(IntPolynomial.parse("x^3 - x - 1"))


@pytest.fixture(scope="session")
def three():
    return certify_pisot(IntPolynomial.parse("x - 3"))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
