"""Weighted Data Rate: the bottleneck link rate on a node's path to the BS.

WDR values are plain floats; the BS has ``UNBOUNDED`` (``math.inf``) so that
a node attached straight to the BS has its BS-link rate as WDR.
"""

from __future__ import annotations

import math

from .core import BS_ID, path_to_bs

UNBOUNDED = math.inf


class EmptyPathError(ValueError):
    pass


def path_wdr(rates) -> float:
    rates = list(rates)
    if not rates:
        raise EmptyPathError("a path needs at least one link")
    return min(rates)


def incremental_wdr(parent_wdr: float, new_link_rate: float) -> float:
    """WDR after attaching below a node whose WDR is ``parent_wdr``."""
    if new_link_rate < 0:
        raise ValueError("link rate must be >= 0")
    return min(parent_wdr, new_link_rate)


def node_wdr(topology, node_id) -> float:
    """Cached WDR of ``node_id`` in ``topology`` (uses ``topology.links``)."""
    if node_id == BS_ID:
        return UNBOUNDED
    cache = topology._wdr_cache
    hit = cache.get(node_id)
    if hit is not None:
        return hit
    node = topology[node_id]
    if node.parent != BS_ID:
        path_to_bs(topology, node_id)  # raises on orphans and cycles before recursing
    value = incremental_wdr(node_wdr(topology, node.parent),
                            topology.links.rate(node_id, node.parent))
    cache[node_id] = value
    return value


def node_wdr_uncached(topology, node_id) -> float:
    """Reference WDR: min over the path's link rates, recomputed from scratch."""
    if node_id == BS_ID:
        return UNBOUNDED
    path = path_to_bs(topology, node_id)
    rates = topology.links.rates
    return path_wdr(float(rates[a, topology[a].parent]) for a in path)
