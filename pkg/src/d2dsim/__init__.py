"""Single-cell D2D network simulator with DAIS transmission-mode selection."""

from .channel import LinkTable, RadioParams
from .core import BS_ID, Mode, Position, Topology, UeNode, distance, path_to_bs, validate_topology
from .dais import Beliefs, Branch, DaisParams, ModeDecision, NeighborAdvert, apply_decision, select_transmission_mode
from .metrics import RunMetrics, measure_decisions
from .scenario import Scenario, generate
from .wdr import UNBOUNDED, node_wdr

__all__ = [
    "BS_ID", "Beliefs", "Branch", "DaisParams", "LinkTable", "Mode", "ModeDecision",
    "NeighborAdvert", "Position", "RadioParams", "RunMetrics", "Scenario", "Topology",
    "UNBOUNDED", "UeNode", "apply_decision", "distance", "generate", "measure_decisions",
    "node_wdr", "path_to_bs", "select_transmission_mode", "validate_topology",
]

__version__ = "0.1.0"
