"""Domain model: nodes, transmission modes and the serving-link forest.

Node ids are non-negative integers. The base station owns id ``BS_ID`` (0)
and is not a :class:`UeNode`; UEs are numbered from 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

BS_ID = 0

DEFAULT_TX_POWER_CELLULAR_MW = 260.0
DEFAULT_TX_POWER_D2D_MW = 130.0


class TopologyError(Exception):
    """Parent links do not form a forest rooted at the BS."""


class NodeNotFoundError(KeyError):
    pass


class DegenerateGeometryError(ValueError):
    """Two endpoints of a link share a position."""


class Position(NamedTuple):
    x: float
    y: float


class Mode(enum.Enum):
    CELLULAR = "cellular"
    D2D_CLIENT = "d2d_client"
    D2D_RELAY = "d2d_relay"
    D2D_MHR = "d2d_mhr"


SERVING_MODES = frozenset({Mode.D2D_RELAY, Mode.D2D_MHR})

# child mode -> modes its parent may hold (None stands for the BS)
ALLOWED_PARENTS = {
    Mode.CELLULAR: frozenset({None}),
    Mode.D2D_CLIENT: frozenset({Mode.D2D_RELAY}),
    Mode.D2D_RELAY: frozenset({None, Mode.D2D_MHR}),
    Mode.D2D_MHR: frozenset({None, Mode.D2D_MHR}),
}


@dataclass
class UeNode:
    id: int
    pos: Position
    battery: float = 1.0
    mode: Mode = Mode.CELLULAR
    parent: int | None = BS_ID
    served: set[int] = field(default_factory=set)
    tx_power_cellular: float = DEFAULT_TX_POWER_CELLULAR_MW
    tx_power_d2d: float = DEFAULT_TX_POWER_D2D_MW


def distance(a: Position, b: Position) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


class Topology:
    """The forest of serving links rooted at the base station.

    ``links`` is an optional link-rate table (see :mod:`d2dsim.channel`);
    WDR queries need it. Mutate parent links only through :meth:`set_parent`
    so that served sets and the WDR cache stay consistent.
    """

    def __init__(self, bs_pos, area, nodes=(), bs_antenna_gain_db=40.0,
                 d_serving_cap=200, max_users_ch=255, links=None):
        self.bs_pos = Position(*bs_pos)
        self.area = (float(area[0]), float(area[1]))
        self.bs_antenna_gain_db = bs_antenna_gain_db
        self.d_serving_cap = d_serving_cap
        self.max_users_ch = max_users_ch
        self.links = links
        self.nodes: dict[int, UeNode] = {}
        self.bs_served: set[int] = set()
        self._wdr_cache: dict[int, float] = {}
        self._pending_children: dict[int, set[int]] = {}
        for node in nodes:
            self.add(node)

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node_id):
        return node_id == BS_ID or node_id in self.nodes

    def __getitem__(self, node_id) -> UeNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise NodeNotFoundError(node_id) from None

    def position(self, node_id) -> Position:
        if node_id == BS_ID:
            return self.bs_pos
        return self[node_id].pos

    def add(self, node: UeNode):
        if node.id == BS_ID or node.id in self.nodes:
            raise ValueError(f"duplicate or reserved node id {node.id}")
        self.nodes[node.id] = node
        if node.parent == BS_ID:
            self.bs_served.add(node.id)
        elif node.parent is not None and node.parent in self.nodes:
            self.nodes[node.parent].served.add(node.id)
        if node.id in self._pending_children:
            node.served |= self._pending_children.pop(node.id)
        if node.parent not in (None, BS_ID) and node.parent not in self.nodes:
            # parent added later picks this child up
            self._pending_children.setdefault(node.parent, set()).add(node.id)

    def children(self, node_id) -> set[int]:
        if node_id == BS_ID:
            return self.bs_served
        return self[node_id].served

    def set_parent(self, node_id, parent):
        """Re-parent ``node_id`` and invalidate WDRs of its subtree."""
        node = self[node_id]
        if parent is not None and parent not in self:
            raise NodeNotFoundError(parent)
        if node.parent is not None and node.parent in self:
            self.children(node.parent).discard(node_id)
        node.parent = parent
        if parent is not None:
            self.children(parent).add(node_id)
        self.invalidate_wdr(node_id)

    def invalidate_wdr(self, node_id):
        stack = [node_id]
        seen = set()
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            self._wdr_cache.pop(n, None)
            stack.extend(self.nodes[n].served)

    def copy(self) -> Topology:
        clone = Topology(self.bs_pos, self.area, (), self.bs_antenna_gain_db,
                         self.d_serving_cap, self.max_users_ch, self.links)
        for n in self.nodes.values():
            clone.nodes[n.id] = UeNode(n.id, n.pos, n.battery, n.mode, n.parent,
                                       set(n.served), n.tx_power_cellular,
                                       n.tx_power_d2d)
        clone.bs_served = set(self.bs_served)
        clone._wdr_cache = dict(self._wdr_cache)
        return clone

    def parent_links(self):
        """Yield ``(child, parent)`` for every UE that has a parent."""
        for n in self.nodes.values():
            if n.parent is not None:
                yield n.id, n.parent

    def state_key(self):
        """Hashable snapshot of roles and links, for before/after comparisons."""
        return tuple(sorted((n.id, n.mode.value, n.parent, tuple(sorted(n.served)))
                            for n in self.nodes.values()))


def path_to_bs(topology: Topology, node_id) -> list[int]:
    """Node ids from ``node_id`` up to (excluding) the BS."""
    if node_id not in topology.nodes:
        raise NodeNotFoundError(node_id)
    path = []
    current = node_id
    limit = len(topology.nodes)
    while current != BS_ID:
        if len(path) >= limit:
            raise TopologyError(f"cycle through node {node_id}")
        node = topology.nodes.get(current)
        if node is None:
            raise NodeNotFoundError(current)
        if node.parent is None:
            raise TopologyError(f"node {current} has no path to the BS")
        path.append(current)
        current = node.parent
    return path


@dataclass(frozen=True)
class Violation:
    kind: str  # "role", "cap", "duality", "cycle", "orphan", "served-role", "battery", "bounds"
    node: int
    detail: str = ""


def validate_topology(topology: Topology) -> list[Violation]:
    """Return every invariant violation found; an empty list means valid."""
    out = []
    nodes = topology.nodes
    w, h = topology.area
    for n in nodes.values():
        if not (0.0 <= n.pos.x <= w and 0.0 <= n.pos.y <= h):
            out.append(Violation("bounds", n.id, f"{n.pos} outside {w}x{h}"))
        if not 0.0 <= n.battery <= 1.0:
            out.append(Violation("battery", n.id, f"{n.battery}"))
        if n.id in n.served:
            out.append(Violation("duality", n.id, "serves itself"))
        if n.parent is None:
            out.append(Violation("orphan", n.id, "no parent"))
        elif n.parent == BS_ID:
            if None not in ALLOWED_PARENTS[n.mode]:
                out.append(Violation("role", n.id, f"{n.mode.value} attached to BS"))
            if n.id not in topology.bs_served:
                out.append(Violation("duality", n.id, "missing from BS served set"))
        elif n.parent not in nodes:
            out.append(Violation("orphan", n.id, f"unknown parent {n.parent}"))
        else:
            p = nodes[n.parent]
            if p.mode not in ALLOWED_PARENTS[n.mode]:
                out.append(Violation("role", n.id,
                                     f"{n.mode.value} under {p.mode.value} {p.id}"))
            if n.id not in p.served:
                out.append(Violation("duality", n.id, f"missing from served({p.id})"))
        for c in n.served:
            if c not in nodes or nodes[c].parent != n.id:
                out.append(Violation("duality", n.id, f"served child {c} points elsewhere"))
        if n.served and n.mode not in SERVING_MODES:
            out.append(Violation("served-role", n.id, f"{n.mode.value} serving {len(n.served)}"))
        if n.mode is Mode.D2D_RELAY and len(n.served) > topology.d_serving_cap:
            out.append(Violation("cap", n.id, f"{len(n.served)} > {topology.d_serving_cap}"))
        elif len(n.served) > topology.max_users_ch:
            out.append(Violation("cap", n.id, f"{len(n.served)} > {topology.max_users_ch}"))
    for c in topology.bs_served:
        if c not in nodes or nodes[c].parent != BS_ID:
            out.append(Violation("duality", BS_ID, f"BS served child {c} points elsewhere"))

    # cycle / reachability: walk each node up, marking nodes known to reach the BS
    reaches = {BS_ID}
    for start in nodes:
        trail = []
        seen = set()
        cur = start
        while cur not in reaches:
            if cur in seen or cur not in nodes or nodes[cur].parent is None:
                if cur in seen:
                    out.append(Violation("cycle", start, f"cycle through {cur}"))
                break
            seen.add(cur)
            trail.append(cur)
            cur = nodes[cur].parent
        else:
            reaches.update(trail)
    return out
