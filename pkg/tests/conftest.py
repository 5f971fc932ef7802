import numpy as np
import pytest

from spacethread import catalog_lookup, sample_box, sample_points

CATALOG_CASES = [
    ("kerr_newman", {"m": 1.0, "a": 0.5, "e": 0.3}),
    ("kerr", {"m": 1.0, "a": 0.5}),
    ("reissner_nordstrom", {"m": 1.0, "e": 0.3}),
    ("schwarzschild", {"m": 1.0}),
    ("flrw", {"scale": "(exp x0)"}),
    ("minkowski", {}),
]


def catalog_points(name, params, count, seed=0):
    spec = catalog_lookup(name, **params)
    return spec, sample_points(spec, sample_box(name, **params), count, seed=seed)


@pytest.fixture
def kn():
    return catalog_lookup("kerr_newman", m=1.0, a=0.5, e=0.3)


@pytest.fixture
def kerr():
    return catalog_lookup("kerr", m=1.0, a=0.5)


@pytest.fixture
def schwarzschild():
    return catalog_lookup("schwarzschild", m=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
