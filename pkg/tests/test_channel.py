import math

import numpy as np
import pytest

from d2dsim.channel import (LinkTable, RadioParams, db_to_linear, link_rate,
                            link_rate_between, link_snr, sample_shadowing)
from d2dsim.core import BS_ID, DegenerateGeometryError, Position, Topology, UeNode

from oracles import RATE_UE_BS_500M, SNR_D2D_50M, SNR_UE_BS_500M

P = RadioParams()


def test_db_to_linear():
    assert db_to_linear(40) == 10000.0
    assert db_to_linear(0) == 1.0
    assert db_to_linear(2) == pytest.approx(1.5849, abs=1e-4)


def test_shadowing_degenerate_and_deterministic():
    assert sample_shadowing(np.random.default_rng(1), 0.0) == 1.0
    a = sample_shadowing(np.random.default_rng(42), 8.0)
    b = sample_shadowing(np.random.default_rng(42), 8.0)
    assert a == b


def test_shadowing_is_zero_mean_in_db():
    draws = sample_shadowing(np.random.default_rng(7), 8.0, size=100_000)
    assert abs(np.mean(10 * np.log10(draws))) < 0.1


def test_link_snr_examples():
    assert link_snr(260, 2, 40, 500, P) == pytest.approx(SNR_UE_BS_500M, rel=1e-12)
    assert link_snr(260, 2, 40, 500, P) == pytest.approx(14.74, abs=0.05)
    assert link_snr(130, 2, 2, 50, P) == pytest.approx(3.694, abs=0.01)
    assert link_snr(130, 2, 2, 50, P) == pytest.approx(SNR_D2D_50M, rel=1e-12)
    assert link_snr(130, 2, 2, 50, P, shadow=2.0) == 2 * link_snr(130, 2, 2, 50, P)


def test_link_snr_zero_distance():
    with pytest.raises(DegenerateGeometryError):
        link_snr(130, 2, 2, 0.0, P)


def test_link_snr_decreasing_in_distance():
    snrs = [link_snr(130, 2, 2, d, P) for d in (1, 10, 50, 100, 500, 1000)]
    assert all(a > b for a, b in zip(snrs, snrs[1:]))


def test_link_rate_examples():
    assert link_rate(1.0, 1.0) == 1.0
    assert link_rate(0.0, 1.0) == 0.0
    assert link_rate(14.74, 1.0) == pytest.approx(3.976, abs=0.01)
    assert link_rate(SNR_UE_BS_500M) == pytest.approx(RATE_UE_BS_500M, rel=1e-12)


def _pair_topology(d_from_bs=500.0):
    bs = Position(500.0, 500.0)
    topo = Topology(bs, (1000.0, 1000.0))
    topo.add(UeNode(1, Position(500.0, 500.0 - d_from_bs)))
    topo.add(UeNode(2, Position(500.0, 500.0 - d_from_bs)))
    return topo


def test_link_rate_between():
    topo = _pair_topology()
    shadow = np.ones((3, 3))
    r = link_rate_between(topo, 1, BS_ID, P, shadow)
    assert r == pytest.approx(RATE_UE_BS_500M, rel=1e-12)
    assert link_rate_between(topo, 1, BS_ID, P, shadow) == r
    with pytest.raises(DegenerateGeometryError):
        link_rate_between(topo, 1, 2, P, shadow)
    assert link_rate_between(topo, 1, BS_ID, P, {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0}) == r


def test_link_table_matches_scalar_path():
    rng = np.random.default_rng(3)
    pos = np.vstack([[500, 500], rng.uniform(0, 1000, size=(6, 2))])
    m = len(pos)
    shadow = np.ones((m, m))
    iu = np.triu_indices(m, 1)
    shadow[iu] = sample_shadowing(rng, 8.0, size=len(iu[0]))
    shadow.T[iu] = shadow[iu]
    table = LinkTable(pos, shadow, P, 260.0, 130.0)
    topo = Topology(pos[0], (1000, 1000))
    for i in range(1, m):
        topo.add(UeNode(i, Position(*pos[i])))
    for a in range(1, m):
        for b in range(m):
            if a != b:
                assert table.rate(a, b) == pytest.approx(
                    link_rate_between(topo, a, b, P, shadow), rel=1e-12)
    assert table.evaluations == (m - 1) * (m - 1)
    with pytest.raises(DegenerateGeometryError):
        table.rate(2, 2)


def test_link_table_rejects_colocated_nodes():
    pos = [[500, 500], [10, 10], [10, 10]]
    with pytest.raises(DegenerateGeometryError):
        LinkTable(pos, np.ones((3, 3)), P, 260.0, 130.0)


def test_link_table_rate_monotone_in_distance():
    pos = np.array([[500, 500]] + [[500, 500 - d] for d in (10, 50, 100, 300, 490)], dtype=float)
    table = LinkTable(pos, np.ones((6, 6)), P, 260.0, 130.0)
    to_bs = table.rates[1:, BS_ID]
    assert all(a >= b for a, b in zip(to_bs, to_bs[1:]))


def test_link_table_for_topology_honours_node_powers():
    topo = _pair_topology(100.0)
    topo[2].pos = Position(500.0, 450.0)
    topo[1].tx_power_cellular = 520.0
    table = LinkTable.for_topology(topo, np.ones((3, 3)), P)
    expect = link_rate(link_snr(520.0, 2, 40, 100.0, P))
    assert table.rates[1, BS_ID] == pytest.approx(expect, rel=1e-12)


def test_radio_params_validation():
    with pytest.raises(ValueError):
        RadioParams(pathloss_exponent=2.0)
    with pytest.raises(ValueError):
        RadioParams(noise_n0=0.0)
    assert math.isclose(RadioParams().noise_n0, 1e-4)
