"""Arrival-order simulation loop for every strategy.

UEs start one at a time in the scenario's seeded arrival order. A starting
DAIS agent hears the current adverts of every relay and multi-hop relay
within LTE Direct range, then runs its startup plan; the resulting decision
is applied to the shared topology before the next agent starts.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import baselines, bdix, dais
from .core import SERVING_MODES
from .wdr import node_wdr

STRATEGIES = ("dais", "sum_rate", "random_cluster", "no_d2d")


class UnknownStrategyError(ValueError):
    pass


@dataclass
class RunResult:
    strategy: str
    topology: object
    decisions: int = 0
    link_evaluations: int = 0
    decision_time_us: float = 0.0
    beliefs_scanned: int = 0
    branches: Counter = field(default_factory=Counter)
    per_decision_evaluations: list = field(default_factory=list)


def _advert(topology, node_id, cache):
    # adverts are shared between listeners until the node's state changes
    adv = cache.get(node_id)
    node = topology[node_id]
    if (adv is None or adv.mode is not node.mode or adv.served_count != len(node.served)
            or adv.wdr != node_wdr(topology, node_id)):
        adv = cache[node_id] = dais.advert_for(topology, node_id)
    return adv


def _hearable(topology, ue_id, broadcasters, radius, cache):
    if not broadcasters:
        return []
    ids = np.fromiter(broadcasters, dtype=np.intp, count=len(broadcasters))
    ids.sort()
    near = ids[topology.links.distances[ue_id, ids] <= radius]
    return [_advert(topology, int(i), cache) for i in near]


def _arrival_loop(scenario, select, topology=None):
    topo = topology if topology is not None else scenario.topology()
    links = topo.links
    result = RunResult("", topo)
    counter = Counter()
    radius = scenario.radio.lte_direct_radius
    broadcasters = set()
    agents = {}
    adverts_cache = {}
    elapsed = 0

    for ue_id in scenario.arrival_order():
        evaluations = 0
        for attempt in range(2):
            adverts = _hearable(topo, ue_id, broadcasters, radius, adverts_cache)
            before = links.evaluations
            t0 = time.perf_counter_ns()
            decision, agent = select(ue_id, topo, adverts, counter)
            elapsed += time.perf_counter_ns() - t0
            evaluations += links.evaluations - before
            try:
                dais.apply_decision(topo, decision)
                break
            except dais.StaleDecisionError:
                # optimistic snapshot: re-run selection once on fresh adverts
                if attempt:
                    raise
        result.per_decision_evaluations.append(evaluations)
        if agent is not None:
            agents[ue_id] = agent
        result.decisions += 1
        result.branches[decision.branch.name] += 1

        for nid in (decision.ue, decision.target):
            if nid is None:
                continue
            node = topo[nid]
            if node.mode in SERVING_MODES:
                broadcasters.add(nid)
            else:
                broadcasters.discard(nid)
        # tell the target's agent about its new role
        if decision.target is not None and decision.target in agents:
            t = topo[decision.target]
            a = agents[decision.target]
            a.post(bdix.EventKind.ROLE_CHANGE_REQUESTED, bdix.RoleChange(t.mode, len(t.served)))
            a.run(topo)
        if agent is not None:
            me = topo[ue_id]
            agent.post(bdix.EventKind.ROLE_CHANGE_REQUESTED, bdix.RoleChange(me.mode, len(me.served)))
            agent.run(topo)

    result.link_evaluations = sum(result.per_decision_evaluations)
    result.decision_time_us = elapsed / 1000.0
    result.beliefs_scanned = counter["beliefs_scanned"]
    return result


def run_dais(scenario, topology=None) -> RunResult:
    params = scenario.dais

    def select(ue_id, topo, adverts, counter):
        agent = bdix.Agent(ue_id, params, counter=counter)
        for adv in adverts:
            agent.post(bdix.EventKind.NEIGHBOR_ADVERT_RECEIVED, adv)
        agent.post(bdix.EventKind.AGENT_STARTUP)
        actions = agent.run(topo)
        decisions = [a for a in actions if isinstance(a, dais.ModeDecision)]
        return decisions[-1], agent

    result = _arrival_loop(scenario, select, topology)
    result.strategy = "dais"
    return result


def run_sum_rate(scenario, topology=None) -> RunResult:
    params = scenario.dais

    def select(ue_id, topo, adverts, counter):
        beliefs = dais.Beliefs(node_wdr(topo, ue_id), {a.id: a for a in adverts},
                               topo.links.rate)
        return baselines.sum_rate_select(topo[ue_id], topo, params, beliefs, counter), None

    result = _arrival_loop(scenario, select, topology)
    result.strategy = "sum_rate"
    return result


def run_no_d2d(scenario) -> RunResult:
    t0 = time.perf_counter_ns()
    topo = baselines.no_d2d_assign(scenario)
    for ue_id in topo.nodes:
        topo.links.rate(ue_id, topo[ue_id].parent)
    elapsed = time.perf_counter_ns() - t0
    n = len(topo)
    return RunResult("no_d2d", topo, decisions=n, link_evaluations=topo.links.evaluations,
                     decision_time_us=elapsed / 1000.0,
                     per_decision_evaluations=[1] * n)


def run_random_cluster(scenario, p_ch=baselines.DEFAULT_P_CH, rng=None) -> RunResult:
    t0 = time.perf_counter_ns()
    topo = baselines.random_cluster_assign(scenario, rng, p_ch)
    for ue_id in topo.nodes:
        topo.links.rate(ue_id, topo[ue_id].parent)
    elapsed = time.perf_counter_ns() - t0
    n = len(topo)
    return RunResult("random_cluster", topo, decisions=n,
                     link_evaluations=topo.links.evaluations,
                     decision_time_us=elapsed / 1000.0,
                     per_decision_evaluations=[1] * n)


def run(strategy, scenario, p_ch=baselines.DEFAULT_P_CH) -> RunResult:
    if strategy == "dais":
        return run_dais(scenario)
    if strategy == "sum_rate":
        return run_sum_rate(scenario)
    if strategy == "no_d2d":
        return run_no_d2d(scenario)
    if strategy == "random_cluster":
        return run_random_cluster(scenario, p_ch)
    raise UnknownStrategyError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
