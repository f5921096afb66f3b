"""Network-level measurements: spectral efficiency, power, clusters, cost."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import sim
from .core import BS_ID, Mode


@dataclass
class RunMetrics:
    spectral_efficiency: float
    total_tx_power: float
    power_saved: float
    cluster_count: int
    mean_cluster_size: float
    mode_histogram: dict = field(default_factory=dict)
    decision_time_total: float = 0.0  # microseconds
    link_evaluations: int = 0
    decisions: int = 0

    @property
    def evaluations_per_decision(self):
        return self.link_evaluations / self.decisions if self.decisions else 0.0


def spectral_efficiency(topology) -> float:
    """Sum of link spectral efficiencies over all parent links."""
    rates = topology.links.rates
    return float(sum(rates[c, p] for c, p in topology.parent_links()))


def total_tx_power(topology) -> float:
    total = 0.0
    for n in topology.nodes.values():
        total += n.tx_power_cellular if n.parent == BS_ID else n.tx_power_d2d
    return total


def power_saved(topology) -> float:
    return sum(n.tx_power_cellular for n in topology.nodes.values()) - total_tx_power(topology)


def cluster_stats(topology):
    """``(cluster_count, mean_cluster_size)`` over relays with clients."""
    sizes = [sum(1 for c in n.served if topology[c].mode is Mode.D2D_CLIENT)
             for n in topology.nodes.values() if n.mode is Mode.D2D_RELAY]
    sizes = [s for s in sizes if s > 0]
    if not sizes:
        return 0, 0.0
    return len(sizes), sum(sizes) / len(sizes)


def mode_histogram(topology) -> dict:
    counts = Counter(n.mode for n in topology.nodes.values())
    return {m: counts.get(m, 0) for m in Mode}


def collect(topology, result=None) -> RunMetrics:
    count, mean = cluster_stats(topology)
    return RunMetrics(
        spectral_efficiency=spectral_efficiency(topology),
        total_tx_power=total_tx_power(topology),
        power_saved=power_saved(topology),
        cluster_count=count,
        mean_cluster_size=mean,
        mode_histogram=mode_histogram(topology),
        decision_time_total=result.decision_time_us if result else 0.0,
        link_evaluations=result.link_evaluations if result else 0,
        decisions=result.decisions if result else 0,
    )


def measure_decisions(strategy, scenario, p_ch=None) -> RunMetrics:
    """Run ``strategy`` over ``scenario`` and measure the final topology."""
    kwargs = {} if p_ch is None else {"p_ch": p_ch}
    result = sim.run(strategy, scenario, **kwargs)
    return collect(result.topology, result)
