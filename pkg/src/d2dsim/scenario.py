"""Scenario generation, seeded reproducibility and the JSON scenario file."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import LinkTable, RadioParams, sample_shadowing
from .core import BS_ID, Mode, Position, Topology, UeNode
from .dais import DaisParams

FORMAT_VERSION = 1

BATTERY_MEAN = 0.6
BATTERY_VARIANCE = 0.4


class ScenarioError(ValueError):
    pass


class ScenarioParseError(ScenarioError):
    pass


class ScenarioVersionError(ScenarioError):
    pass


class ScenarioValidationError(ScenarioError):
    pass


def sample_battery(rng, mean=BATTERY_MEAN, variance=BATTERY_VARIANCE, size=None):
    """Battery fraction ~ Normal(mean, variance), clipped to [0, 1]."""
    return np.clip(rng.normal(mean, np.sqrt(variance), size), 0.0, 1.0)


@dataclass
class Scenario:
    seed: int
    area: tuple[float, float]
    bs: Position
    positions: np.ndarray  # (n_ues, 2), row i is UE id i + 1
    batteries: np.ndarray  # (n_ues,)
    shadow: np.ndarray  # (n_ues + 1, n_ues + 1) symmetric, row 0 = BS
    radio: RadioParams = field(default_factory=RadioParams)
    dais: DaisParams = field(default_factory=DaisParams)

    @property
    def n_ues(self):
        return len(self.positions)

    @property
    def ue_ids(self):
        return range(1, self.n_ues + 1)

    def link_table(self) -> LinkTable:
        pos = np.vstack([np.asarray(self.bs, dtype=float)[None, :], self.positions])
        return LinkTable(pos, self.shadow, self.radio,
                         tx_power_cellular=260.0, tx_power_d2d=130.0)

    def topology(self, links=None) -> Topology:
        """Every UE cellular and attached to the BS; the starting state."""
        topo = Topology(self.bs, self.area, bs_antenna_gain_db=self.radio.bs_antenna_gain_db,
                        d_serving_cap=self.dais.d_serving_cap,
                        max_users_ch=self.dais.max_users_ch,
                        links=links if links is not None else self.link_table())
        for i, ((x, y), b) in enumerate(zip(self.positions, self.batteries), start=1):
            topo.add(UeNode(i, Position(float(x), float(y)), float(b), Mode.CELLULAR, BS_ID))
        return topo

    def arrival_order(self) -> list[int]:
        """Seeded permutation of UE ids, the order agents start in."""
        rng = _streams(self.seed)["arrival"]
        return [int(i) + 1 for i in rng.permutation(self.n_ues)]

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr((FORMAT_VERSION, self.seed, tuple(self.area), tuple(self.bs),
                       dataclasses.astuple(self.radio),
                       dataclasses.astuple(self.dais))).encode())
        for arr in (self.positions, self.batteries, self.shadow):
            h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
        return h.hexdigest()

    def with_params(self, radio=None, dais=None) -> Scenario:
        return dataclasses.replace(self, radio=radio or self.radio, dais=dais or self.dais)


def _streams(seed):
    names = ("positions", "battery", "shadow", "arrival")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(s) for name, s in zip(names, children)}


def generate(n, seed, area=(1000.0, 1000.0), radio=None, dais=None,
             battery_variance=BATTERY_VARIANCE) -> Scenario:
    if n < 1:
        raise ScenarioError("a scenario needs at least one UE")
    radio = radio or RadioParams()
    dais = dais or DaisParams()
    w, h = float(area[0]), float(area[1])
    rngs = _streams(seed)
    positions = rngs["positions"].uniform((0.0, 0.0), (w, h), size=(n, 2))
    batteries = sample_battery(rngs["battery"], variance=battery_variance, size=n)

    m = n + 1
    iu = np.triu_indices(m, k=1)
    shadow = np.ones((m, m))
    draws = sample_shadowing(rngs["shadow"], radio.shadowing_sigma_db, size=len(iu[0]))
    shadow[iu] = draws
    shadow[(iu[1], iu[0])] = draws
    return Scenario(int(seed), (w, h), Position(w / 2, h / 2), positions, batteries,
                    shadow, radio, dais)


# --- file format ---------------------------------------------------------

def to_dict(scenario: Scenario) -> dict:
    m = scenario.n_ues + 1
    a_idx, b_idx = np.triu_indices(m, k=1)
    factors = scenario.shadow[a_idx, b_idx]
    return {
        "version": FORMAT_VERSION,
        "seed": scenario.seed,
        "n_ues": scenario.n_ues,
        "area": {"w": scenario.area[0], "h": scenario.area[1]},
        "bs": {"x": scenario.bs.x, "y": scenario.bs.y},
        "radio": dataclasses.asdict(scenario.radio),
        "dais": dataclasses.asdict(scenario.dais),
        "nodes": [{"id": i + 1, "x": float(x), "y": float(y), "battery": float(b)}
                  for i, ((x, y), b) in enumerate(zip(scenario.positions, scenario.batteries))],
        "shadow": [{"a": int(a), "b": int(b), "factor": float(f)}
                   for a, b, f in zip(a_idx, b_idx, factors)],
    }


def dumps(scenario: Scenario) -> str:
    d = to_dict(scenario)
    head = {k: v for k, v in d.items() if k not in ("nodes", "shadow")}
    # one record per line keeps parse errors pointing at a useful line
    parts = [json.dumps(head)[:-1]]
    parts.append(', "nodes": [\n' + ",\n".join(json.dumps(r) for r in d["nodes"]) + "\n]")
    parts.append(', "shadow": [\n' + ",\n".join(json.dumps(r) for r in d["shadow"]) + "\n]}\n")
    return "".join(parts)


def save(scenario: Scenario, path):
    Path(path).write_text(dumps(scenario))


def _field(obj, key, where):
    try:
        return obj[key]
    except (KeyError, TypeError):
        raise ScenarioParseError(f"missing field '{key}' in {where}") from None


def from_dict(d) -> Scenario:
    if not isinstance(d, dict):
        raise ScenarioParseError("top level must be an object")
    version = _field(d, "version", "scenario")
    if version != FORMAT_VERSION:
        raise ScenarioVersionError(f"unsupported scenario version {version!r}, "
                                   f"expected {FORMAT_VERSION}")
    n = _field(d, "n_ues", "scenario")
    nodes = _field(d, "nodes", "scenario")
    if not isinstance(n, int) or n < 1:
        raise ScenarioValidationError(f"n_ues must be a positive integer, got {n!r}")
    if len(nodes) != n:
        raise ScenarioValidationError(f"n_ues is {n} but the node list has {len(nodes)} entries")
    try:
        radio = RadioParams(**_field(d, "radio", "scenario"))
        dais = DaisParams(**_field(d, "dais", "scenario"))
    except TypeError as exc:
        raise ScenarioParseError(f"bad parameter block: {exc}") from None
    area = _field(d, "area", "scenario")
    bs = _field(d, "bs", "scenario")

    positions = np.empty((n, 2))
    batteries = np.empty(n)
    for k, rec in enumerate(nodes):
        where = f"nodes[{k}]"
        if _field(rec, "id", where) != k + 1:
            raise ScenarioValidationError(f"{where}.id is {rec['id']}, expected {k + 1}")
        positions[k] = (_field(rec, "x", where), _field(rec, "y", where))
        batteries[k] = _field(rec, "battery", where)

    m = n + 1
    shadow = np.ones((m, m))
    seen = np.zeros((m, m), dtype=bool)
    records = _field(d, "shadow", "scenario")
    for k, rec in enumerate(records):
        where = f"shadow[{k}]"
        a, b, f = _field(rec, "a", where), _field(rec, "b", where), _field(rec, "factor", where)
        if not (0 <= a < b < m):
            raise ScenarioValidationError(f"{where} has bad pair ({a}, {b})")
        shadow[a, b] = shadow[b, a] = f
        seen[a, b] = True
    expected = m * (m - 1) // 2
    if len(records) != expected or seen.sum() != expected:
        raise ScenarioValidationError(f"shadow table covers {int(seen.sum())} of {expected} pairs")

    return Scenario(_field(d, "seed", "scenario"),
                    (float(_field(area, "w", "area")), float(_field(area, "h", "area"))),
                    Position(float(_field(bs, "x", "bs")), float(_field(bs, "y", "bs"))),
                    positions, batteries, shadow, radio, dais)


def loads(text: str) -> Scenario:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(d)


def load(path) -> Scenario:
    return loads(Path(path).read_text())
