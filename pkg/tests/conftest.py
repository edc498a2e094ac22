import numpy as np
import pytest

import evacgame as eg

# Pass/fail lines recorded by the acceptance suite, echoed after the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def paper_graph():
    return eg.generate_from_histogram(eg.PAPER_HISTOGRAM, seed=1)


@pytest.fixture(scope="session")
def paper_rank_high(paper_graph):
    return eg.degree_rank(paper_graph, eg.Order.HIGHEST_FIRST, seed=0)


@pytest.fixture(scope="session")
def paper_rank_low(paper_graph):
    return eg.degree_rank(paper_graph, eg.Order.LOWEST_FIRST, seed=0)


@pytest.fixture
def path3():
    # 0 - 1 - 2
    return eg.Graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def two_node():
    return eg.Graph(2, [(0, 1)])


@pytest.fixture(scope="session")
def small_ws():
    return eg.generate_small_world(200, 4, 0.2, seed=3)


def brute_force_payoffs(graph, decisions, matrix):
    """Edge-enumeration oracle for accumulate_payoffs."""
    w = np.zeros(graph.node_count)
    for i, j in graph.edges():
        a, b = eg.pair_payoff(
            matrix, eg.Decision(int(decisions[i])), eg.Decision(int(decisions[j]))
        )
        w[i] += a
        w[j] += b
    return w
