"""Synchronous round engine with loss, churn events, and trace recording.

Rounds run in lockstep: every active agent forms its message from its
start-of-round table, all deliveries happen against one barrier, and only
then are receptions merged.  Traces record the start-of-round tables and
the transmitted messages, so row k of a trace holds exactly the table and
message an agent had at round k.

Runs are deterministic: a fixed config (including seed) reproduces the
trace byte for byte.
"""
from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from typing import Union

from . import graph as graphmod
from .errors import CodecError, ConfigError, ProtocolError
from .graph import Topology
from .primes import PrimeRegistry, bit_length
from .protocol import (AgentState, Variant, form_message, join, leave,
                       make_agent, receive_message)


@dataclass(frozen=True)
class JoinEvent:
    round_index: int
    node: int
    attach_to: tuple[int, ...]
    value: int


@dataclass(frozen=True)
class LeaveEvent:
    round_index: int
    node: int


Event = Union[JoinEvent, LeaveEvent]


@dataclass(frozen=True)
class TopologySpec:
    """A named family (with n and, for random graphs, p), an edge-list file,
    or an explicit inline edge set."""
    family: str | None = None
    n: int | None = None
    p: float | None = None
    edge_file: str | None = None
    edges: tuple[tuple[int, int], ...] | None = None

    def build(self, seed: int) -> Topology:
        if self.edges is not None:
            nodes = {n for e in self.edges for n in e}
            return Topology(nodes, self.edges)
        if self.edge_file is not None:
            return graphmod.load_edge_list(self.edge_file)
        if self.family is None or self.n is None:
            raise ConfigError("topology: needs family+n, edge_file, or edges")
        graph_seed = f"{seed}:graph" if self.family == "random_connected" else None
        return graphmod.generate(self.family, self.n, self.p, graph_seed)


@dataclass(frozen=True)
class SimConfig:
    topology: TopologySpec
    variant: Variant = Variant.PRIMETIME
    max_value: int = 4
    data_values: tuple[int, ...] | None = None  # explicit per-node values; None = random
    loss_q: float = 0.0
    drop_schedule: tuple[tuple[int, int, int], ...] = ()  # (round, src, dst) forced drops
    events: tuple[Event, ...] = ()
    max_rounds: int | None = None  # default 4 * diameter + 16
    extra_rounds: int = 3  # rounds recorded past completion, to expose steady state
    seed: int = 0
    n_max: int | None = None  # agent-count cap for the tabular size baseline

    def validate(self) -> None:
        if self.max_value < 1:
            raise ConfigError(f"max_value must be >= 1, got {self.max_value}")
        if not 0 <= self.loss_q < 1:
            raise ConfigError(f"loss_q must be in [0, 1), got {self.loss_q}")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be >= 1, got {self.max_rounds}")
        if self.extra_rounds < 1:
            raise ConfigError(f"extra_rounds must be >= 1, got {self.extra_rounds}")
        rounds = [e.round_index for e in self.events]
        if len(rounds) != len(set(rounds)):
            raise ConfigError("events: at most one join or leave per round")
        for e in self.events:
            if e.round_index < 0:
                raise ConfigError(f"events: negative round {e.round_index}")
            if isinstance(e, JoinEvent) and not 1 <= e.value <= self.max_value:
                raise ConfigError(
                    f"events: join value {e.value} outside [1, {self.max_value}]"
                )
        for r, _, _ in self.drop_schedule:
            if r < 0:
                raise ConfigError(f"drop_schedule: negative round {r}")


@dataclass
class RoundTrace:
    """Everything observable about one round, keyed by agent id."""
    round_index: int
    tables: dict[int, dict[int, int]]  # start-of-round snapshots, present agents only
    active_pairs: dict[int, tuple[int, int]]  # agent -> (own prime, own value)
    messages: dict[int, int]
    message_bits: dict[int, int]
    delivered: list[tuple[int, int]]
    dropped: list[tuple[int, int]]
    anomalies: list[str] = field(default_factory=list)

    def incoming(self, receiver: int) -> dict[int, int]:
        """Messages delivered to `receiver` this round, keyed by sender."""
        return {s: self.messages[s] for s, r in self.delivered if r == receiver}


@dataclass
class RunResult:
    config: SimConfig
    initial_topology: Topology
    final_topology: Topology
    traces: list[RoundTrace]
    agent_primes: dict[int, int]  # every agent ever present, including departed
    agent_values: dict[int, int]
    diameter: int
    completion_round: int | None
    peak_message_bits: int
    total_bits_transmitted: int

    @property
    def anomaly_count(self) -> int:
        return sum(len(t.anomalies) for t in self.traces)


def apply_loss(edges: list[tuple[int, int]], q: float,
               rng: random.Random) -> list[tuple[int, int]]:
    """Drop each directed delivery independently with probability q.

    Draws once per edge in the given order, so a fixed rng state yields a
    reproducible pattern; q = 0 delivers everything without consuming draws.
    """
    if q == 0:
        return list(edges)
    return [e for e in edges if rng.random() >= q]


def completion_round(traces: list[RoundTrace]) -> int | None:
    """First round whose snapshot shows every active table holding every
    active agent's pair; None if never observed."""
    for trace in traces:
        required = set(trace.active_pairs.values())
        if all(required <= set(trace.tables[i].items()) for i in trace.active_pairs):
            return trace.round_index
    return None


def run(cfg: SimConfig) -> RunResult:
    """Execute a full simulation.

    Per round: apply scheduled churn, snapshot tables, form messages (a
    leaver's goodbye replaces its normal transmission), deliver subject to
    loss, merge receptions, then retire the leaver from the topology.  The
    run stops `extra_rounds` after the completion predicate first holds
    with no churn left in flight, or at max_rounds.
    """
    cfg.validate()
    topology = cfg.topology.build(cfg.seed)
    initial_topology = topology
    diam = graphmod.diameter(topology)
    max_rounds = cfg.max_rounds if cfg.max_rounds is not None else 4 * diam + 16

    data_rng = random.Random(f"{cfg.seed}:data")
    loss_rng = random.Random(f"{cfg.seed}:loss")

    registry = PrimeRegistry()
    agents: dict[int, AgentState] = {}
    agent_primes: dict[int, int] = {}
    agent_values: dict[int, int] = {}
    nodes = topology.nodes
    if cfg.data_values is not None:
        if len(cfg.data_values) != len(nodes):
            raise ConfigError(
                f"data_values: got {len(cfg.data_values)} values for {len(nodes)} nodes"
            )
        values = list(cfg.data_values)
    else:
        values = [data_rng.randint(1, cfg.max_value) for _ in nodes]
    for node, value in zip(nodes, values):
        if not 1 <= value <= cfg.max_value:
            raise ConfigError(f"data_values: {value} outside [1, {cfg.max_value}]")
        prime = registry.assign_next(node)
        agents[node] = make_agent(node, prime, value, cfg.variant, cfg.max_value)
        agent_primes[node] = prime
        agent_values[node] = value

    events_by_round = {e.round_index: e for e in cfg.events}
    last_event_round = max(events_by_round, default=-1)
    forced_drops: dict[int, set[tuple[int, int]]] = {}
    for r, src, dst in cfg.drop_schedule:
        forced_drops.setdefault(r, set()).add((src, dst))

    traces: list[RoundTrace] = []
    countdown: int | None = None

    for k in range(max_rounds):
        anomalies: list[str] = []
        leaving: int | None = None

        event = events_by_round.get(k)
        if isinstance(event, JoinEvent):
            topology = topology.with_node_added(event.node, event.attach_to)
            sponsor = min(event.attach_to)
            state = join(event.node, agents[sponsor].table, registry,
                         event.value, cfg.variant, cfg.max_value)
            agents[event.node] = state
            agent_primes[event.node] = state.own_prime
            agent_values[event.node] = state.own_value
        elif isinstance(event, LeaveEvent):
            if event.node not in agents or not agents[event.node].active:
                raise ConfigError(f"events: leave of absent agent {event.node} at round {k}")
            leaving = event.node

        present = [n for n in topology.nodes if agents[n].active]
        tables = {i: dict(agents[i].table) for i in present}
        active_pairs = {i: (agents[i].own_prime, agents[i].own_value) for i in present}

        messages: dict[int, int] = {}
        for i in present:
            if i == leaving:
                messages[i] = leave(agents[i])
            else:
                messages[i] = form_message(agents[i])

        directed = sorted((u, v) for u in topology.nodes
                          for v in topology.adjacency[u])
        forced = forced_drops.get(k, set())
        candidates = [e for e in directed if e not in forced]
        delivered = apply_loss(candidates, cfg.loss_q, loss_rng)
        delivered_set = set(delivered)
        dropped = [e for e in directed if e not in delivered_set]

        senders_of: dict[int, list[int]] = {}
        for sender, target in delivered:
            senders_of.setdefault(target, []).append(sender)
        for receiver in present:
            if not agents[receiver].active:
                continue  # the leaver hears this round's traffic but discards it
            for sender in senders_of.get(receiver, ()):
                try:
                    for note in receive_message(agents[receiver], messages[sender]):
                        anomalies.append(
                            f"round {k}: agent {receiver} <- agent {sender}: {note}"
                        )
                except (ProtocolError, CodecError) as exc:
                    anomalies.append(
                        f"round {k}: agent {receiver} rejected message from {sender}: {exc}"
                    )

        if leaving is not None:
            topology = topology.without_node(leaving)
            registry.release(leaving)
            if not topology.is_connected():
                anomalies.append(
                    f"round {k}: leave of agent {leaving} disconnected the graph"
                )

        traces.append(RoundTrace(
            round_index=k,
            tables=tables,
            active_pairs=active_pairs,
            messages=messages,
            message_bits={i: bit_length(m) for i, m in messages.items()},
            delivered=delivered,
            dropped=dropped,
            anomalies=anomalies,
        ))

        active_now = [n for n in topology.nodes if agents[n].active]
        required = {(agents[n].own_prime, agents[n].own_value) for n in active_now}
        settled = (
            all(required <= set(agents[n].table.items()) for n in active_now)
            and k >= last_event_round
            and not any(agents[n].goodbye_relay for n in active_now)
        )
        if settled:
            countdown = cfg.extra_rounds if countdown is None else countdown - 1
            if countdown == 0:
                break
        else:
            countdown = None

    all_bits = [b for t in traces for b in t.message_bits.values()]
    return RunResult(
        config=cfg,
        initial_topology=initial_topology,
        final_topology=topology,
        traces=traces,
        agent_primes=agent_primes,
        agent_values=agent_values,
        diameter=diam,
        completion_round=completion_round(traces),
        peak_message_bits=max(all_bits, default=0),
        total_bits_transmitted=sum(all_bits),
    )


TRACE_COLUMNS = ("round", "agent", "prime", "message_decimal", "message_bits",
                 "table_size", "active")


def trace_rows(result: RunResult) -> list[tuple]:
    """Flatten a run into (round, agent, ...) rows, one per round and agent.

    Agents absent from a round (departed or not yet joined) appear with
    active=0 and zeroed message fields, keeping the table rectangular.
    """
    rows = []
    all_agents = sorted(result.agent_primes)
    for trace in result.traces:
        for agent in all_agents:
            prime = result.agent_primes[agent]
            if agent in trace.messages:
                rows.append((trace.round_index, agent, prime,
                             trace.messages[agent], trace.message_bits[agent],
                             len(trace.tables[agent]), 1))
            else:
                rows.append((trace.round_index, agent, prime, 0, 0, 0, 0))
    return rows


def write_trace_csv(result: RunResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        writer.writerows(trace_rows(result))


def summary_text(result: RunResult) -> str:
    completion = result.completion_round
    lines = [
        f"completion_round = {completion if completion is not None else 'never'}",
        f"diameter = {result.diameter}",
        f"peak_message_bits = {result.peak_message_bits}",
        f"total_bits_transmitted = {result.total_bits_transmitted}",
    ]
    return "\n".join(lines) + "\n"


def write_summary(result: RunResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(summary_text(result))
