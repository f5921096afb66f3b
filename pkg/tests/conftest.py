import numpy as np
import pytest

from d2dsim.channel import LinkTable
from d2dsim.core import BS_ID, Mode, Position, Topology, UeNode


def build_topology(layout, rates=None, positions=None, cap=200):
    """Hand-built topology.

    ``layout`` maps id -> (mode, parent). ``rates`` maps (child, parent) -> rate;
    missing links default to 1.0.
    """
    n = max([*layout, *(x for pair in (rates or {}) for x in pair)]) + 1
    matrix = np.ones((n, n))
    np.fill_diagonal(matrix, 0.0)
    for (a, b), r in (rates or {}).items():
        matrix[a, b] = matrix[b, a] = r
    topo = Topology((500.0, 500.0), (1000.0, 1000.0), d_serving_cap=cap,
                    links=LinkTable.from_rates(matrix))
    for nid, (mode, parent) in layout.items():
        pos = positions.get(nid, Position(10.0 * nid, 10.0)) if positions else Position(10.0 * nid, 10.0)
        topo.add(UeNode(nid, pos, 1.0, mode, parent))
    return topo


@pytest.fixture
def chain():
    """client 1 -> relay 2 -> MHR 3 -> BS."""
    return build_topology(
        {1: (Mode.D2D_CLIENT, 2), 2: (Mode.D2D_RELAY, 3), 3: (Mode.D2D_MHR, BS_ID)},
        rates={(1, 2): 2.0, (2, 3): 1.5, (3, BS_ID): 4.0},
    )


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
