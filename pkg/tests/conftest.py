from fractions import Fraction

import pytest

from padic_rds.config import RdsSpec
from padic_rds.utils.otel_wrapper import TracerFactory


def pytest_addoption(parser):
    parser.addoption(
        "--full-suite",
        action="store_true",
        default=False,
        help="run full test suite including the long Monte Carlo acceptance runs"
    )


def pytest_collection_modifyitems(config, items):
    # Handle full suite option
    if not config.getoption("--full-suite"):
        for item in items:
            if item.get_closest_marker("full_suite"):
                item.add_marker(pytest.mark.skip(reason="Monte Carlo acceptance run - use --full-suite to include"))


@pytest.fixture(autouse=True)
def no_span_export():
    """Every test starts with the tracer built from an exporter-less config."""
    TracerFactory.shutdown()
    TracerFactory.get_tracer(config={"exporter": "none", "service_name": "padic-rds-tests"})
    yield
    TracerFactory.shutdown()


@pytest.fixture
def spec29():
    """The p = 29 example with the probabilities of the worked chain."""
    return RdsSpec(p=29, exponents=(29, 2, 3),
                   probabilities=(Fraction(1, 5), Fraction(2, 5), Fraction(2, 5)), seed=7)


@pytest.fixture
def make_spec():
    def _make(p, exponents, probabilities=None, **kwargs):
        return RdsSpec(p=p, exponents=exponents, probabilities=probabilities, **kwargs)
    return _make
