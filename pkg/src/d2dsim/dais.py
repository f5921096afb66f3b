"""DAIS transmission-mode selection.

Five candidate predicates are checked in a fixed priority order. The first
one with a qualifying neighbour decides the branch:

1. ``CONNECT_AS_CLIENT``: a relay close by offers a better WDR.
2. ``PROMOTE_MHR_TO_RELAY_AND_JOIN``: an idle multi-hop relay close by
   offers a better WDR; it becomes a relay and the UE its client.
3. ``DEMOTE_RELAY_TO_MHR_AND_JOIN_AS_RELAY``: an idle relay in the
   mid-range band offers a better WDR; it becomes a multi-hop relay and the
   UE a relay below it.
4. ``BECOME_MHR_AND_ADOPT_RELAY``: a relay in the mid-range band is clearly
   worse off than the UE; the UE becomes a multi-hop relay and adopts it.
5. ``BECOME_RELAY_UNDER_MHR``: an idle multi-hop relay in the far band
   offers a better WDR; the UE becomes a relay below it.

Otherwise the UE stays on the BS as a multi-hop relay (``DEFAULT_MHR_TO_BS``).

With ``path_aware`` on (the default) a candidate's WDR is judged through the
link that would join it, ``min(advertised_wdr, link_rate)``, which is the
WDR the moved node would actually get.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

from .core import BS_ID, Mode, Position, distance
from .wdr import UNBOUNDED, incremental_wdr, node_wdr


class StaleDecisionError(RuntimeError):
    """The decision's target no longer satisfies the branch preconditions."""


@dataclass(frozen=True)
class DaisParams:
    max_users_ch: int = 255
    d_serving_cap: int = 200
    max_query_d2dr_distance: float = 200.0
    max_distance_form_cluster: float = 100.0
    # stored for completeness; the static scenario never reads them
    max_speed_backhauling: float = 1.5
    max_distance_multihop: float = 1000.0
    max_distance_move_away: float = 100.0
    perc_data_rate: float = 0.2
    battery_threshold: float = 0.7
    battery_option_enabled: bool = False
    path_aware: bool = True

    def __post_init__(self):
        if not (self.max_distance_form_cluster <= self.max_query_d2dr_distance
                <= self.max_distance_multihop):
            raise ValueError("need form_cluster <= query_d2dr <= multihop distances")
        if not 0 < self.perc_data_rate < 1:
            raise ValueError("perc_data_rate must be in (0, 1)")
        if not 0 <= self.battery_threshold <= 1:
            raise ValueError("battery_threshold must be in [0, 1]")
        if self.d_serving_cap > self.max_users_ch:
            raise ValueError("d_serving_cap may not exceed max_users_ch")


@dataclass(frozen=True)
class NeighborAdvert:
    id: int
    pos: Position
    mode: Mode
    wdr: float
    served_count: int
    battery: float


@dataclass
class Beliefs:
    """What one agent knows: its own WDR and the adverts it has heard.

    ``link_rate(tx, rx)`` gives precalculated link rates; ``None`` means the
    agent judges candidates on advertised WDR alone.
    """

    self_wdr: float = UNBOUNDED
    neighbors: dict[int, NeighborAdvert] = field(default_factory=dict)
    link_rate: Callable[[int, int], float] | None = None


class Branch(enum.IntEnum):
    CONNECT_AS_CLIENT = 1
    PROMOTE_MHR_TO_RELAY_AND_JOIN = 2
    DEMOTE_RELAY_TO_MHR_AND_JOIN_AS_RELAY = 3
    BECOME_MHR_AND_ADOPT_RELAY = 4
    BECOME_RELAY_UNDER_MHR = 5
    DEFAULT_MHR_TO_BS = 6


# resulting (ue mode, target mode) per branch
_RESULT_MODES = {
    Branch.CONNECT_AS_CLIENT: (Mode.D2D_CLIENT, Mode.D2D_RELAY),
    Branch.PROMOTE_MHR_TO_RELAY_AND_JOIN: (Mode.D2D_CLIENT, Mode.D2D_RELAY),
    Branch.DEMOTE_RELAY_TO_MHR_AND_JOIN_AS_RELAY: (Mode.D2D_RELAY, Mode.D2D_MHR),
    Branch.BECOME_MHR_AND_ADOPT_RELAY: (Mode.D2D_MHR, Mode.D2D_RELAY),
    Branch.BECOME_RELAY_UNDER_MHR: (Mode.D2D_RELAY, Mode.D2D_MHR),
}

# mode the target must hold when the decision is made
_TARGET_PRE_MODE = {
    Branch.CONNECT_AS_CLIENT: Mode.D2D_RELAY,
    Branch.PROMOTE_MHR_TO_RELAY_AND_JOIN: Mode.D2D_MHR,
    Branch.DEMOTE_RELAY_TO_MHR_AND_JOIN_AS_RELAY: Mode.D2D_RELAY,
    Branch.BECOME_MHR_AND_ADOPT_RELAY: Mode.D2D_RELAY,
    Branch.BECOME_RELAY_UNDER_MHR: Mode.D2D_MHR,
}

_NEEDS_IDLE_TARGET = {
    Branch.PROMOTE_MHR_TO_RELAY_AND_JOIN,
    Branch.DEMOTE_RELAY_TO_MHR_AND_JOIN_AS_RELAY,
    Branch.BECOME_RELAY_UNDER_MHR,
}


@dataclass(frozen=True)
class ModeDecision:
    ue: int
    branch: Branch
    target: int | None = None
    self_mode: Mode = Mode.D2D_MHR
    target_mode: Mode | None = None

    def __post_init__(self):
        if (self.branch is Branch.DEFAULT_MHR_TO_BS) != (self.target is None):
            raise ValueError(f"{self.branch.name} with target {self.target}")

    @classmethod
    def for_branch(cls, ue, branch, target=None, self_mode=Mode.D2D_MHR):
        if branch is Branch.DEFAULT_MHR_TO_BS:
            return cls(ue, branch, None, self_mode, None)
        ue_mode, target_mode = _RESULT_MODES[branch]
        return cls(ue, branch, target, ue_mode, target_mode)


def _raised(wdr, params):
    return wdr + params.perc_data_rate * wdr


def _lowered(wdr, params):
    return wdr - params.perc_data_rate * wdr


def _battery_ok(battery, params):
    return not params.battery_option_enabled or battery >= params.battery_threshold


def _cheap_match(branch, ue, adv, d, self_wdr, params):
    """Checks that need no link rate: role, distance band, load, battery, WDR."""
    up = _raised(self_wdr, params)
    near = d <= params.max_distance_form_cluster
    mid = params.max_distance_form_cluster <= d <= params.max_query_d2dr_distance
    if branch is Branch.CONNECT_AS_CLIENT:
        return (adv.mode is Mode.D2D_RELAY and near and adv.wdr >= up
                and adv.served_count <= params.d_serving_cap - 1)
    if branch is Branch.PROMOTE_MHR_TO_RELAY_AND_JOIN:
        return adv.mode is Mode.D2D_MHR and near and adv.served_count == 0 and adv.wdr >= up
    if branch is Branch.DEMOTE_RELAY_TO_MHR_AND_JOIN_AS_RELAY:
        return (adv.mode is Mode.D2D_RELAY and mid and adv.served_count == 0
                and adv.wdr >= up and _battery_ok(adv.battery, params))
    if branch is Branch.BECOME_MHR_AND_ADOPT_RELAY:
        return (adv.mode is Mode.D2D_RELAY and mid
                and adv.wdr <= _lowered(self_wdr, params)
                and _battery_ok(adv.battery, params) and _battery_ok(ue.battery, params))
    if branch is Branch.BECOME_RELAY_UNDER_MHR:
        return (adv.mode is Mode.D2D_MHR
                and params.max_query_d2dr_distance <= d <= params.max_distance_multihop
                and adv.served_count == 0 and adv.wdr >= up
                and _battery_ok(adv.battery, params))
    raise ValueError(branch)


def _score(branch, ue, adv, beliefs, params):
    """Selection key for a cheap-matched candidate, or None if it fails the
    link-dependent part of the predicate."""
    if not params.path_aware or beliefs.link_rate is None:
        return adv.wdr
    if branch is Branch.BECOME_MHR_AND_ADOPT_RELAY:
        # the adopted relay must end up clearly better off below the UE
        via_ue = incremental_wdr(beliefs.self_wdr, beliefs.link_rate(adv.id, ue.id))
        if adv.wdr <= _lowered(via_ue, params):
            return adv.wdr
        return None
    prospective = incremental_wdr(adv.wdr, beliefs.link_rate(ue.id, adv.id))
    if prospective >= _raised(beliefs.self_wdr, params):
        return prospective
    return None


def _argmax(scored):
    """Pick max score, ties to the smaller distance, then the smaller id."""
    best = None
    for score, d, node_id in scored:
        key = (-score, d, node_id)
        if best is None or key < best:
            best = key
    return None if best is None else best[2]


def _find(branch, ue, beliefs, params):
    scored = []
    for adv in beliefs.neighbors.values():
        d = distance(ue.pos, adv.pos)
        if _cheap_match(branch, ue, adv, d, beliefs.self_wdr, params):
            s = _score(branch, ue, adv, beliefs, params)
            if s is not None:
                scored.append((s, d, adv.id))
    return _argmax(scored)


def find_max_d2dr(ue, beliefs, params):
    return _find(Branch.CONNECT_AS_CLIENT, ue, beliefs, params)


def find_max_d2dmhr_no_connections(ue, beliefs, params):
    return _find(Branch.PROMOTE_MHR_TO_RELAY_AND_JOIN, ue, beliefs, params)


def find_max_d2dr_no_connections_to_be_d2dmhr(ue, beliefs, params):
    return _find(Branch.DEMOTE_RELAY_TO_MHR_AND_JOIN_AS_RELAY, ue, beliefs, params)


def find_max_d2dr_to_use_ue_d2dmhr(ue, beliefs, params):
    return _find(Branch.BECOME_MHR_AND_ADOPT_RELAY, ue, beliefs, params)


def find_max_d2dmhr_as_multihop(ue, beliefs, params):
    return _find(Branch.BECOME_RELAY_UNDER_MHR, ue, beliefs, params)


FINDERS = {
    Branch.CONNECT_AS_CLIENT: find_max_d2dr,
    Branch.PROMOTE_MHR_TO_RELAY_AND_JOIN: find_max_d2dmhr_no_connections,
    Branch.DEMOTE_RELAY_TO_MHR_AND_JOIN_AS_RELAY: find_max_d2dr_no_connections_to_be_d2dmhr,
    Branch.BECOME_MHR_AND_ADOPT_RELAY: find_max_d2dr_to_use_ue_d2dmhr,
    Branch.BECOME_RELAY_UNDER_MHR: find_max_d2dmhr_as_multihop,
}
CANDIDATE_BRANCHES = tuple(FINDERS)


def candidate_buckets(ue, beliefs, params, counter=None):
    """Single pass over the belief table sorting neighbours into the
    branches whose cheap checks they pass. Returns ``{branch: [(adv, d)]}``."""
    buckets = {b: [] for b in CANDIDATE_BRANCHES}
    scanned = 0
    for adv in beliefs.neighbors.values():
        scanned += 1
        d = distance(ue.pos, adv.pos)
        for b in CANDIDATE_BRANCHES:
            if _cheap_match(b, ue, adv, d, beliefs.self_wdr, params):
                buckets[b].append((adv, d))
    if counter is not None:
        counter["beliefs_scanned"] += scanned
    return buckets


def default_decision(ue, params) -> ModeDecision:
    mode = Mode.D2D_MHR if _battery_ok(ue.battery, params) else Mode.CELLULAR
    return ModeDecision.for_branch(ue.id, Branch.DEFAULT_MHR_TO_BS, self_mode=mode)


def select_transmission_mode(ue, beliefs, params, counter=None) -> ModeDecision:
    """Run the DAIS plan for a UE currently attached to the BS.

    ``counter`` (a ``collections.Counter``) receives ``beliefs_scanned``.
    Link rates are fetched lazily, only for neighbours of the branch being
    tested, so later branches cost nothing once an earlier one fires.
    """
    buckets = candidate_buckets(ue, beliefs, params, counter)
    for branch in CANDIDATE_BRANCHES:
        scored = []
        for adv, d in buckets[branch]:
            s = _score(branch, ue, adv, beliefs, params)
            if s is not None:
                scored.append((s, d, adv.id))
        target = _argmax(scored)
        if target is not None:
            return ModeDecision.for_branch(ue.id, branch, target)
    return default_decision(ue, params)


def check_decision(topology, decision: ModeDecision):
    """Raise :class:`StaleDecisionError` if ``decision`` no longer applies."""
    ue = topology[decision.ue]
    if ue.mode is not Mode.CELLULAR or ue.parent != BS_ID or ue.served:
        raise StaleDecisionError(f"UE {ue.id} is no longer a fresh BS-attached node")
    branch = decision.branch
    if branch is Branch.DEFAULT_MHR_TO_BS:
        return
    if decision.target == ue.id or decision.target not in topology.nodes:
        raise StaleDecisionError(f"bad target {decision.target}")
    t = topology[decision.target]
    if t.mode is not _TARGET_PRE_MODE[branch]:
        raise StaleDecisionError(f"target {t.id} is {t.mode.value} now")
    if branch in _NEEDS_IDLE_TARGET and t.served:
        raise StaleDecisionError(f"target {t.id} serves {len(t.served)} nodes now")
    if branch is Branch.CONNECT_AS_CLIENT and len(t.served) >= topology.d_serving_cap:
        raise StaleDecisionError(f"relay {t.id} is full")
    if branch is Branch.BECOME_MHR_AND_ADOPT_RELAY and len(ue.served) >= topology.max_users_ch:
        raise StaleDecisionError(f"UE {ue.id} cannot adopt more relays")


def apply_decision(topology, decision: ModeDecision):
    """Carry out ``decision`` on ``topology`` in place and return it."""
    check_decision(topology, decision)
    ue = topology[decision.ue]
    branch = decision.branch
    if branch is Branch.DEFAULT_MHR_TO_BS:
        ue.mode = decision.self_mode
        return topology
    t = topology[decision.target]
    t.mode = decision.target_mode
    ue.mode = decision.self_mode
    if branch is Branch.BECOME_MHR_AND_ADOPT_RELAY:
        topology.set_parent(t.id, ue.id)
    else:
        topology.set_parent(ue.id, t.id)
    return topology


def advert_for(topology, node_id) -> NeighborAdvert:
    n = topology[node_id]
    return NeighborAdvert(n.id, n.pos, n.mode, node_wdr(topology, node_id),
                          len(n.served), n.battery)
