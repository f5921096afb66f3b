"""Radio model: log-distance path gain, frozen log-normal shadowing, Shannon rate.

SNR = P * G_tx * G_rx * shadow / (d**alpha * N0), powers in mW, no
interference term (every link gets an unused resource block). With the
default 1 Hz bandwidth a link rate is a spectral efficiency in b/s/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BS_ID, DegenerateGeometryError, distance


@dataclass(frozen=True)
class RadioParams:
    pathloss_exponent: float = 3.5
    bs_antenna_gain_db: float = 40.0
    ue_antenna_gain_db: float = 2.0
    noise_n0: float = 1e-4
    shadowing_sigma_db: float = 8.0
    bandwidth_hz: float = 1.0
    wifi_direct_radius: float = 200.0
    lte_direct_radius: float = 1000.0
    bs_range: float = 1000.0

    def __post_init__(self):
        if not self.pathloss_exponent > 2:
            raise ValueError("pathloss_exponent must exceed 2")
        if not self.noise_n0 > 0:
            raise ValueError("noise_n0 must be positive")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing_sigma_db must be >= 0")
        if min(self.wifi_direct_radius, self.lte_direct_radius, self.bs_range) <= 0:
            raise ValueError("radii must be positive")


def db_to_linear(g_db):
    return 10.0 ** (g_db / 10.0)


def sample_shadowing(rng: np.random.Generator, sigma_db: float, size=None):
    """Log-normal shadowing factor 10**(X/10), X ~ N(0, sigma_db**2)."""
    if sigma_db < 0:
        raise ValueError("sigma_db must be >= 0")
    if sigma_db == 0:
        return 1.0 if size is None else np.ones(size)
    return 10.0 ** (rng.normal(0.0, sigma_db, size) / 10.0)


def link_snr(tx_power, tx_gain_db, rx_gain_db, d, params: RadioParams, shadow=1.0):
    if d <= 0:
        raise DegenerateGeometryError("link endpoints coincide")
    if tx_power <= 0:
        raise ValueError("tx_power must be positive")
    gain = db_to_linear(tx_gain_db) * db_to_linear(rx_gain_db)
    return tx_power * gain * shadow / (d ** params.pathloss_exponent * params.noise_n0)


def link_rate(snr, bandwidth_hz=1.0):
    if snr < 0:
        raise ValueError("snr must be >= 0")
    return bandwidth_hz * math.log2(1.0 + snr)


def link_rate_between(topology, a, b, params: RadioParams, shadow_table):
    """Uplink rate from UE ``a`` to ``b`` (a UE or the BS).

    ``shadow_table`` is indexable as ``shadow_table[a, b]`` (a frozen
    symmetric matrix) or is a mapping keyed by the sorted pair.
    """
    if a == b:
        raise DegenerateGeometryError("a node has no link to itself")
    ue = topology[a]
    d = distance(ue.pos, topology.position(b))
    if isinstance(shadow_table, dict):
        shadow = shadow_table[(min(a, b), max(a, b))]
    else:
        shadow = float(shadow_table[a, b])
    if b == BS_ID:
        snr = link_snr(ue.tx_power_cellular, params.ue_antenna_gain_db,
                       params.bs_antenna_gain_db, d, params, shadow)
    else:
        snr = link_snr(ue.tx_power_d2d, params.ue_antenna_gain_db,
                       params.ue_antenna_gain_db, d, params, shadow)
    return link_rate(snr, params.bandwidth_hz)


class LinkTable:
    """Precomputed link rates for one scenario, indexed by node id (row 0 = BS).

    :meth:`rate` is the counted access path used by decision logic;
    ``evaluations`` tallies those calls. Bulk metric code reads ``rates``
    directly, which is not counted.
    """

    def __init__(self, positions, shadow, params: RadioParams,
                 tx_power_cellular, tx_power_d2d):
        pos = np.asarray(positions, dtype=float)
        n = len(pos)
        shadow = np.asarray(shadow, dtype=float)
        if shadow.shape != (n, n):
            raise ValueError(f"shadow table shape {shadow.shape} != {(n, n)}")
        p_cell = np.broadcast_to(np.asarray(tx_power_cellular, dtype=float), (n,))
        p_d2d = np.broadcast_to(np.asarray(tx_power_d2d, dtype=float), (n,))

        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        off_diag = ~np.eye(n, dtype=bool)
        if np.any(dist[off_diag] == 0):
            i, j = np.argwhere((dist == 0) & off_diag)[0]
            raise DegenerateGeometryError(f"nodes {i} and {j} are co-located")

        g_ue = db_to_linear(params.ue_antenna_gain_db)
        g_bs = db_to_linear(params.bs_antenna_gain_db)
        # row a = transmitter a
        power = np.repeat(p_d2d[:, None], n, axis=1) * g_ue * g_ue
        power[:, BS_ID] = p_cell * g_ue * g_bs
        with np.errstate(divide="ignore", invalid="ignore"):
            snr = power * shadow / (dist ** params.pathloss_exponent * params.noise_n0)
        snr[BS_ID, :] = snr[:, BS_ID]
        np.fill_diagonal(snr, 0.0)
        self.params = params
        self.distances = dist
        self.rates = params.bandwidth_hz * np.log2(1.0 + snr)
        self.evaluations = 0

    @classmethod
    def from_rates(cls, rates, distances=None, params=None):
        """Wrap an explicit rate matrix (hand-built test topologies)."""
        table = cls.__new__(cls)
        table.params = params or RadioParams()
        table.rates = np.asarray(rates, dtype=float)
        table.distances = (np.zeros_like(table.rates) if distances is None
                           else np.asarray(distances, dtype=float))
        table.evaluations = 0
        return table

    @classmethod
    def for_topology(cls, topology, shadow, params: RadioParams):
        """Rate table honouring each node's own transmit powers.

        Node ids must be 1..N so that they double as matrix indices.
        """
        n = len(topology.nodes)
        if sorted(topology.nodes) != list(range(1, n + 1)):
            raise ValueError("node ids must be 1..N")
        pos = [topology.bs_pos] + [topology.nodes[i].pos for i in range(1, n + 1)]
        p_cell = [0.0] + [topology.nodes[i].tx_power_cellular for i in range(1, n + 1)]
        p_d2d = [0.0] + [topology.nodes[i].tx_power_d2d for i in range(1, n + 1)]
        return cls(pos, shadow, params, np.array(p_cell), np.array(p_d2d))

    def __len__(self):
        return len(self.rates)

    def rate(self, a, b) -> float:
        if a == b:
            raise DegenerateGeometryError("a node has no link to itself")
        self.evaluations += 1
        return float(self.rates[a, b])
