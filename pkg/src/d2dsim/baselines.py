"""Comparison strategies: direct cellular, random clustering, sum-rate selection."""

from __future__ import annotations

import numpy as np

from . import dais
from .core import BS_ID, Mode
from .wdr import node_wdr

DEFAULT_P_CH = 0.14  # about 7 heads among 50 UEs


def no_d2d_assign(scenario):
    """Every UE talks straight to the BS."""
    return scenario.topology()


def random_cluster_assign(scenario, rng=None, p_ch=DEFAULT_P_CH):
    """Bernoulli cluster-head election, then nearest-head join.

    Heads become relays on the BS. Every other UE joins the nearest head
    with spare capacity within WiFi Direct range, or stays cellular.
    """
    if not 0 < p_ch <= 1:
        raise ValueError("p_ch must be in (0, 1]")
    if rng is None:
        rng = np.random.default_rng([scenario.seed, 0xC1])
    topo = scenario.topology()
    ids = np.arange(1, scenario.n_ues + 1)
    is_head = rng.random(scenario.n_ues) < p_ch
    heads = ids[is_head]
    for h in heads:
        topo[int(h)].mode = Mode.D2D_RELAY
    if len(heads) == 0:
        return topo
    dist = topo.links.distances
    radius = scenario.radio.wifi_direct_radius
    cap = topo.d_serving_cap
    for u in ids[~is_head]:
        d = dist[u, heads]
        for k in np.argsort(d, kind="stable"):
            if d[k] > radius:
                break
            h = int(heads[k])
            if len(topo[h].served) < cap:
                topo[int(u)].mode = Mode.D2D_CLIENT
                topo.set_parent(int(u), h)
                break
    return topo


def _parent_array(topology, overrides=None):
    size = max(topology.nodes, default=0) + 1
    parent = np.zeros(size, dtype=np.intp)
    present = np.zeros(size, dtype=bool)
    for n in topology.nodes.values():
        parent[n.id] = n.parent
        present[n.id] = True
    if overrides:
        for child, p in overrides.items():
            parent[child] = p
    return parent, present


def delivered_rates(topology, overrides=None):
    """Path-bottleneck rate of every UE, recomputed from all links.

    ``overrides`` maps child -> hypothetical parent and leaves the topology
    untouched. Returns an array indexed by node id (zero where absent).
    """
    parent, present = _parent_array(topology, overrides)
    if not present.any():
        return np.zeros(len(parent))
    idx = np.arange(len(parent))
    link = np.where(present, topology.links.rates[idx, parent], 0.0)
    topology.links.evaluations += int(present.sum())
    at_bs = parent == BS_ID
    wdr = link.copy()
    for _ in range(int(present.sum()) + 1):
        upstream = np.where(at_bs, np.inf, wdr[parent])
        new = np.minimum(link, upstream)
        if np.array_equal(new, wdr):
            break
        wdr = new
    return np.where(present, wdr, 0.0)


def network_sum_rate(topology, overrides=None) -> float:
    """Sum over UEs of the rate delivered along each UE's path."""
    if not topology.nodes:
        return 0.0
    return float(delivered_rates(topology, overrides).sum())


def _override_for(decision):
    if decision.branch is dais.Branch.DEFAULT_MHR_TO_BS:
        return {}
    if decision.branch is dais.Branch.BECOME_MHR_AND_ADOPT_RELAY:
        return {decision.target: decision.ue}
    return {decision.ue: decision.target}


def sum_rate_select(ue, topology, params, beliefs=None, counter=None):
    """Pick the feasible branch/candidate that maximises network sum rate.

    Feasibility uses the same five predicates as DAIS; each feasible option
    (plus staying on the BS) is scored by recomputing the whole network's
    sum rate with the change applied hypothetically.
    """
    if beliefs is None:
        beliefs = dais.Beliefs(node_wdr(topology, ue.id),
                               {a.id: a for a in broadcast_adverts(topology, ue.id)},
                               topology.links.rate)
    buckets = dais.candidate_buckets(ue, beliefs, params, counter)
    options = [dais.default_decision(ue, params)]
    order = {}
    for branch in dais.CANDIDATE_BRANCHES:
        for adv, d in buckets[branch]:
            if dais._score(branch, ue, adv, beliefs, params) is not None:
                dec = dais.ModeDecision.for_branch(ue.id, branch, adv.id)
                options.append(dec)
                order[dec] = (int(branch), d, adv.id)
    best, best_key = None, None
    for dec in options:
        total = network_sum_rate(topology, _override_for(dec))
        key = (-total,) + order.get(dec, (int(dais.Branch.DEFAULT_MHR_TO_BS), 0.0, 0))
        if best_key is None or key < best_key:
            best, best_key = dec, key
    return best


def broadcast_adverts(topology, ue_id, radius=None):
    """Adverts of every relay / multi-hop relay the UE can hear."""
    links = topology.links
    out = []
    for n in topology.nodes.values():
        if n.id == ue_id or n.mode not in (Mode.D2D_RELAY, Mode.D2D_MHR):
            continue
        if radius is not None and links.distances[ue_id, n.id] > radius:
            continue
        out.append(dais.advert_for(topology, n.id))
    return out
