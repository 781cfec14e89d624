import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bninv.graph import Dag
from bninv.io import read_graph

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "bninv" / "fixtures"


@pytest.fixture
def fig():
    def load(name):
        return read_graph(FIXTURES / f"{name}.dot")
    return load


@st.composite
def dags(draw, min_nodes=1, max_nodes=6):
    """Random DAG: edges ascend a random permutation of n0..n{k-1}."""
    n = draw(st.integers(min_nodes, max_nodes))
    nodes = [f"n{i}" for i in range(n)]
    order = draw(st.permutations(nodes))
    pairs = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Dag(nodes, [p for p, k in zip(pairs, keep) if k])


@st.composite
def dag_pairs(draw, min_nodes=1, max_nodes=5):
    g = draw(dags(min_nodes, max_nodes))
    h = draw(dags(len(g), len(g)))
    return g, h


def chain(*nodes):
    return Dag(nodes, list(zip(nodes, nodes[1:])))


def seeded(seed):
    return random.Random(seed)


# acceptance criteria record (number, passed, detail) here; printed at the end
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
