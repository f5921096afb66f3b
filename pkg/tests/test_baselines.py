import numpy as np
import pytest

from d2dsim import generate
from d2dsim.baselines import (delivered_rates, network_sum_rate, no_d2d_assign,
                              random_cluster_assign, sum_rate_select)
from d2dsim.core import BS_ID, Mode, Position, UeNode, validate_topology
from d2dsim.dais import Beliefs, Branch, DaisParams, NeighborAdvert, select_transmission_mode
from d2dsim.metrics import mode_histogram

from conftest import build_topology
from oracles import RATE_UE_BS_500M


def test_no_d2d():
    sc = generate(10, seed=3)
    topo = no_d2d_assign(sc)
    hist = mode_histogram(topo)
    assert hist[Mode.CELLULAR] == 10 and hist[Mode.D2D_RELAY] == 0
    assert all(n.parent == BS_ID for n in topo.nodes.values())
    assert validate_topology(topo) == []


def test_random_cluster_all_heads():
    topo = random_cluster_assign(generate(30, seed=1), p_ch=1.0)
    assert all(n.mode is Mode.D2D_RELAY and not n.served for n in topo.nodes.values())


def test_random_cluster_zero_heads_equals_no_d2d():
    sc = generate(20, seed=2)

    class NoHeads:
        def random(self, n):
            return np.ones(n)

    topo = random_cluster_assign(sc, rng=NoHeads())
    assert topo.state_key() == no_d2d_assign(sc).state_key()


def test_random_cluster_reproducible_and_valid():
    sc = generate(50, seed=11)
    a = random_cluster_assign(sc)
    b = random_cluster_assign(sc)
    heads = {n.id for n in a.nodes.values() if n.mode is Mode.D2D_RELAY}
    assert heads == {n.id for n in b.nodes.values() if n.mode is Mode.D2D_RELAY}
    assert validate_topology(a) == []
    for n in a.nodes.values():
        if n.mode is Mode.D2D_CLIENT:
            assert a.links.distances[n.id, n.parent] <= sc.radio.wifi_direct_radius


def test_random_cluster_rejects_bad_p_ch():
    with pytest.raises(ValueError):
        random_cluster_assign(generate(5, seed=0), p_ch=0.0)


def test_sum_rate_examples():
    one = build_topology({1: (Mode.CELLULAR, BS_ID)}, rates={(1, BS_ID): RATE_UE_BS_500M})
    assert network_sum_rate(one) == pytest.approx(3.976, abs=1e-3)
    two = build_topology({1: (Mode.CELLULAR, BS_ID), 2: (Mode.CELLULAR, BS_ID)},
                         rates={(1, BS_ID): 3.0, (2, BS_ID): 2.0})
    assert network_sum_rate(two) == 5.0
    empty = build_topology({1: (Mode.CELLULAR, BS_ID)})
    del empty.nodes[1]
    empty.bs_served.clear()
    assert network_sum_rate(empty) == 0.0


def test_delivered_rates_are_path_bottlenecks(chain):
    rates = delivered_rates(chain)
    assert list(rates[1:]) == [1.5, 1.5, 4.0]
    hypothetical = delivered_rates(chain, {2: BS_ID})
    assert hypothetical[2] == 1.0 and hypothetical[1] == 1.0


def test_sum_rate_select_does_not_mutate():
    topo = build_topology({1: (Mode.CELLULAR, BS_ID), 2: (Mode.D2D_RELAY, BS_ID)},
                          rates={(1, BS_ID): 1.0, (2, BS_ID): 5.0, (1, 2): 4.0},
                          positions={1: Position(0.0, 0.0), 2: Position(50.0, 0.0)})
    before = topo.state_key()
    d = sum_rate_select(topo[1], topo, DaisParams())
    assert topo.state_key() == before
    assert (d.branch, d.target) == (Branch.CONNECT_AS_CLIENT, 2)


def test_sum_rate_select_empty_beliefs_defaults():
    topo = build_topology({1: (Mode.CELLULAR, BS_ID)})
    d = sum_rate_select(topo[1], topo, DaisParams(), Beliefs(1.0, {}, topo.links.rate))
    assert d.branch is Branch.DEFAULT_MHR_TO_BS


def test_sum_rate_agrees_with_dais_when_one_candidate_dominates():
    topo = build_topology({1: (Mode.CELLULAR, BS_ID), 2: (Mode.D2D_RELAY, BS_ID),
                           3: (Mode.D2D_RELAY, BS_ID)},
                          rates={(1, BS_ID): 1.0, (2, BS_ID): 6.0, (3, BS_ID): 2.0,
                                 (1, 2): 5.0, (1, 3): 1.5},
                          positions={1: Position(0.0, 0.0), 2: Position(40.0, 0.0),
                                     3: Position(60.0, 0.0)})
    p = DaisParams()
    beliefs = Beliefs(1.0, {i: NeighborAdvert(i, topo[i].pos, Mode.D2D_RELAY,
                                              topo.links.rates[i, BS_ID], 0, 1.0)
                            for i in (2, 3)}, topo.links.rate)
    assert sum_rate_select(topo[1], topo, p, beliefs) == select_transmission_mode(topo[1], beliefs, p)


def test_sum_rate_counts_network_evaluations():
    topo = build_topology({1: (Mode.CELLULAR, BS_ID), 2: (Mode.D2D_RELAY, BS_ID)},
                          positions={1: Position(0.0, 0.0), 2: Position(50.0, 0.0)},
                          rates={(2, BS_ID): 5.0, (1, 2): 4.0})
    before = topo.links.evaluations
    network_sum_rate(topo)
    assert topo.links.evaluations - before == 2
