"""A small BDIx agent: perceive an event, deliberate, run one plan step.

Desires are the fixed priority table in :data:`PRIORITY`. The only
non-trivial plan is DAIS transmission-mode selection; a serving agent's plan
re-broadcasts its advert and an idle agent does nothing.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable

from . import dais
from .core import SERVING_MODES, Mode
from .wdr import node_wdr


class SequencingError(RuntimeError):
    pass


class ConfigurationError(RuntimeError):
    pass


class EventKind(enum.Enum):
    AGENT_STARTUP = "agent_startup"
    NEIGHBOR_ADVERT_RECEIVED = "neighbor_advert_received"
    NEIGHBOR_WITHDRAWN = "neighbor_withdrawn"
    ROLE_CHANGE_REQUESTED = "role_change_requested"


@dataclass(frozen=True)
class Event:
    seq: int
    kind: EventKind
    payload: Any = None


@dataclass(frozen=True)
class RoleChange:
    mode: Mode
    served_count: int


class Goal(enum.Enum):
    SELECT_TRANSMISSION_MODE = "select_transmission_mode"
    SERVE_ATTACHED_CLIENTS = "serve_attached_clients"
    IDLE = "idle"


PRIORITY = {
    Goal.SELECT_TRANSMISSION_MODE: 2,
    Goal.SERVE_ATTACHED_CLIENTS: 1,
    Goal.IDLE: 0,
}


@dataclass(frozen=True)
class Intention:
    goal: Goal

    @property
    def priority(self):
        return PRIORITY[self.goal]


IDLE = Intention(Goal.IDLE)


def _select_plan(agent, topology):
    ue = topology[agent.node]
    agent.beliefs.self_wdr = node_wdr(topology, agent.node)
    if agent.beliefs.link_rate is None and topology.links is not None:
        agent.beliefs.link_rate = topology.links.rate
    decision = dais.select_transmission_mode(ue, agent.beliefs, agent.params, agent.counter)
    agent.startup_pending = False
    return [decision]


def _serve_plan(agent, topology):
    return [dais.advert_for(topology, agent.node)]


def _idle_plan(agent, topology):
    return []


DEFAULT_PLANS: dict[Goal, Callable] = {
    Goal.SELECT_TRANSMISSION_MODE: _select_plan,
    Goal.SERVE_ATTACHED_CLIENTS: _serve_plan,
    Goal.IDLE: _idle_plan,
}


@dataclass
class Agent:
    node: int
    params: dais.DaisParams = field(default_factory=dais.DaisParams)
    beliefs: dais.Beliefs = field(default_factory=dais.Beliefs)
    intention: Intention = IDLE
    plans: dict = field(default_factory=lambda: dict(DEFAULT_PLANS))
    queue: deque = field(default_factory=deque)
    mode: Mode = Mode.CELLULAR
    served_count: int = 0
    startup_pending: bool = False
    last_seq: int = -1
    log: list = field(default_factory=list)
    counter: Any = None

    def __post_init__(self):
        if not self.plans:
            raise ConfigurationError("an agent needs at least one plan")

    def post(self, kind, payload=None) -> Event:
        """Queue an event stamped with the next sequence number."""
        seq = self.queue[-1].seq + 1 if self.queue else self.last_seq + 1
        event = Event(seq, kind, payload)
        self.queue.append(event)
        return event

    def run(self, topology):
        """Process every queued event; return the actions produced."""
        actions = []
        while self.queue:
            actions.extend(step(self, self.queue.popleft(), topology))
        return actions


def perceive(agent: Agent, event: Event) -> Agent:
    if event.seq <= agent.last_seq:
        raise SequencingError(f"agent {agent.node}: event {event.seq} after {agent.last_seq}")
    agent.last_seq = event.seq
    kind = event.kind
    if kind is EventKind.AGENT_STARTUP:
        agent.startup_pending = True
    elif kind is EventKind.NEIGHBOR_ADVERT_RECEIVED:
        adv = event.payload
        if adv.id != agent.node:
            agent.beliefs.neighbors[adv.id] = adv
    elif kind is EventKind.NEIGHBOR_WITHDRAWN:
        agent.beliefs.neighbors.pop(event.payload, None)
    elif kind is EventKind.ROLE_CHANGE_REQUESTED:
        agent.mode = event.payload.mode
        agent.served_count = event.payload.served_count
    return agent


def deliberate(agent: Agent) -> Intention:
    if agent.startup_pending:
        best = Goal.SELECT_TRANSMISSION_MODE
    elif agent.mode in SERVING_MODES and agent.served_count > 0:
        best = Goal.SERVE_ATTACHED_CLIENTS
    else:
        best = Goal.IDLE
    if best is not agent.intention.goal:
        agent.intention = Intention(best)
    return agent.intention


def execute_step(agent: Agent, topology) -> list:
    plan = agent.plans.get(agent.intention.goal)
    if plan is None:
        raise ConfigurationError(f"no plan for {agent.intention.goal.value}")
    return plan(agent, topology)


def step(agent: Agent, event: Event, topology) -> list:
    """One pass of the agent loop; the outcome is appended to ``agent.log``."""
    perceive(agent, event)
    intention = deliberate(agent)
    actions = execute_step(agent, topology)
    agent.log.append((event.seq, event.kind, intention.goal, tuple(actions)))
    return actions
