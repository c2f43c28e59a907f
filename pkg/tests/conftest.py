import sys
import random

import pytest
from hypothesis import settings

settings.register_profile("fixed", derandomize=True, deadline=None, max_examples=200)
settings.load_profile("fixed")

SEED = 20240521


def pytest_addoption(parser):
    parser.addoption("--full-grid", action="store_true", default=False,
                     help="run the full step-2 reduction grids (tens of minutes)")


def pytest_configure(config):
    config.addinivalue_line("markers", "full_grid: needs --full-grid")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--full-grid"):
        return
    skip = pytest.mark.skip(reason="needs --full-grid")
    for item in items:
        if "full_grid" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return random.Random(SEED)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
