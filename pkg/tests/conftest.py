import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from plumbing_pc.graph_core import load_graph

HERE = Path(__file__).parent
DATA = HERE / "data"
sys.path.insert(0, str(HERE))

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# graphs shared by several modules; |H| > 1 for chain22, lens, d4, star334, star2333
SMALL = ["minus1", "minus2", "chain22", "lens", "d4", "star237", "star334", "star2333"]
WITH_NODES = ["d4", "star237", "star334", "star2333", "example"]


def graph_path(name):
    return DATA / f"{name}.txt"


def graph(name):
    return load_graph(graph_path(name))


@pytest.fixture(scope="session")
def example():
    return graph("example")


# acceptance lines are collected here and echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
