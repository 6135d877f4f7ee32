"""
Single-run discrete event loop.

Per arrival: draw the next arrival, decide to transmit with the node's current
transmit probability, and if so put the packet (carrying the node's piggyback
payload) on the channel. One packet duration after a node's quota of arrivals
its epoch closes: every transmission of the epoch is resolved by then, the
channel counters become `EpochMetrics`, the node's ledger closes its reporting
period and the node's agent learns.
"""
import heapq
import itertools
import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Tuple

from .agent import Agent
from .channel import PACKET_DURATION, Channel, Outcome, TransmissionRecord
from .info_exchange import PiggybackLedger
from .scenario import ScenarioConfig
from .traffic import next_interarrival, node_rng, pick_destination

_ARRIVAL = 0
_CLOSE = 1
_LOAD = 2

_log = logging.getLogger(__name__)


class EpochRow(NamedTuple):
    epoch: int
    node: int
    generated: int
    transmitted: int
    collided: int
    delivered: int
    duration: float
    collision_prob: float
    throughput: float
    # What the node itself believes its throughput is (piggybacked reports,
    # or ground truth when the bypass is enabled)
    observed_throughput: float
    offered_load: float
    effective_load: float
    state: int
    action: int
    probability: float
    reward: float
    epsilon: float
    fairness: float


class NodeSummary(NamedTuple):
    node: int
    load: float
    throughput: float
    collision_prob: float
    effective_load: float
    action: int


@dataclass
class RunResult:
    config: ScenarioConfig
    rows: List[EpochRow]
    # `S(t)`, summed over the nodes that report epoch `t`
    network: List[float]
    summary: Dict[int, NodeSummary]
    sim_time: float = 0.0
    transmissions: List[Tuple[float, int, int, str]] = field(default_factory=list)
    ledgers: List[tuple] = field(default_factory=list)

    @property
    def final_actions(self) -> Dict[int, int]:
        return {n: s.action for n, s in self.summary.items()}

    @property
    def network_throughput(self) -> float:
        return sum(s.throughput for s in self.summary.values())

    def node_rows(self, node) -> List[EpochRow]:
        return [r for r in self.rows if r.node == node]

    def series(self, node, column) -> List[float]:
        return [getattr(r, column) for r in self.rows if r.node == node]


def _modal(actions) -> int:
    counts = Counter(actions)
    best = max(counts.values())
    return min(a for a, c in counts.items() if c == best)


def summarize(rows: List[EpochRow], fraction) -> NodeSummary:
    window = rows[-max(1, int(round(fraction * len(rows)))):]
    k = len(window)
    return NodeSummary(
        node=window[0].node,
        load=sum(r.offered_load for r in window) / k,
        throughput=sum(r.throughput for r in window) / k,
        collision_prob=sum(r.collision_prob for r in window) / k,
        effective_load=sum(r.effective_load for r in window) / k,
        action=_modal(r.action for r in window),
    )


class _Simulation:
    def __init__(self, cfg: ScenarioConfig):
        topo = cfg.topology
        self.cfg = cfg
        self.sources = cfg.sources()
        self.rngs = [node_rng(cfg.seed, n) for n in topo.nodes]
        self.nbrs = [topo.neighbors(n) for n in topo.nodes]
        self.channel = Channel(topo)
        self.ledgers = [PiggybackLedger(n, self.nbrs[n]) for n in topo.nodes]
        self.agents = [
            Agent(n, cfg.agent, self.rngs[n], learning=cfg.learning) for n in topo.nodes
        ]

        self.loads = [s.load_erlang for s in self.sources]
        self.truth = [0.0] * topo.node_count
        self.arrivals = [0] * topo.node_count
        self.closed = [0] * topo.node_count
        # Pending arrivals carry the token current when they were drawn, a
        # load change bumps it so the old draw is ignored
        self.tokens = [0] * topo.node_count
        self.remaining = {s.node for s in self.sources if s.ever_active()}

        self.rows: List[EpochRow] = []
        self.transmissions = []
        self.ledger_dump = []
        self._events = []
        self._seq = itertools.count()

    def _push(self, at, kind, node, arg=None):
        heapq.heappush(self._events, (at, next(self._seq), kind, node, arg))

    def _schedule_arrival(self, node, now):
        gap = next_interarrival(self.rngs[node], self.loads[node])
        if not math.isinf(gap):
            self._push(now + gap, _ARRIVAL, node, self.tokens[node])

    def start(self):
        for src in self.sources:
            for at, load in src.schedule:
                self._push(at, _LOAD, src.node, load)
        for n in self.cfg.topology.nodes:
            self._schedule_arrival(n, 0.0)

    def step(self) -> float:
        """
        Handle the earliest pending event and return its time.
        """
        now, _, kind, node, arg = heapq.heappop(self._events)
        if kind == _ARRIVAL:
            if arg == self.tokens[node]:
                self._on_arrival(node, now)
        elif kind == _CLOSE:
            self._on_close(node, now)
        else:
            self._on_load(node, now, arg)
        return now

    def run(self) -> float:
        self.start()
        now = 0.0
        while self._events and self.remaining:
            now = self.step()

        if self.remaining:
            _log.warning(
                "nodes %s stopped generating traffic before reaching %d epochs",
                sorted(self.remaining),
                self.cfg.epochs,
            )
        return now

    def _on_arrival(self, node, now):
        rng = self.rngs[node]
        self._schedule_arrival(node, now)
        self.channel.note_generated(node)

        if rng.random() < self.agents[node].probability:
            self._deliver(self.channel.resolve(now))
            tx = TransmissionRecord(
                sender=node,
                receiver=pick_destination(rng, self.nbrs[node]),
                start=now,
                payload=self.ledgers[node].build_payload(),
            )
            self.channel.submit(tx)

        self.arrivals[node] += 1
        if self.arrivals[node] == self.cfg.packets_per_epoch:
            self.arrivals[node] = 0
            self.channel.roll_epoch(node)
            self._push(now + PACKET_DURATION, _CLOSE, node)

    def _on_load(self, node, now, load):
        self.loads[node] = load
        self.tokens[node] += 1
        self._schedule_arrival(node, now)

        if load == 0 and not any(
            g > 0 for at, g in self.sources[node].schedule if at > now
        ):
            # Never going to close another epoch
            self.remaining.discard(node)

    def _deliver(self, finished):
        channel = self.channel
        for tx in finished:
            if tx.outcome is Outcome.DELIVERED:
                ledger = self.ledgers[tx.receiver]
                ledger.record_reception(tx.sender)
                ledger.ingest_payload(tx.sender, tx.payload, channel.open_epoch(tx.receiver))
            if self.cfg.trace_transmissions:
                self.transmissions.append((tx.start, tx.sender, tx.receiver, tx.outcome.value))

    def _on_close(self, node, now):
        cfg = self.cfg
        self._deliver(self.channel.resolve(now))
        metrics = self.channel.close_epoch(node)
        ledger = self.ledgers[node]
        ledger.close_period(metrics.duration)
        self.truth[node] = metrics.throughput

        if cfg.ground_truth_info:
            own = metrics.throughput
            neighbor_throughputs = [self.truth[j] for j in self.nbrs[node]]
        else:
            own = ledger.own_throughput
            neighbor_throughputs = ledger.neighbor_throughputs()

        agent = self.agents[node]
        action = agent.action
        probability = agent.probability
        epsilon = cfg.agent.epsilon(metrics.epoch) if cfg.learning else 0.0
        step = agent.step(metrics.collision_prob, own, neighbor_throughputs)

        if metrics.epoch < cfg.epochs:
            self.rows.append(
                EpochRow(
                    epoch=metrics.epoch,
                    node=node,
                    generated=metrics.generated,
                    transmitted=metrics.transmitted,
                    collided=metrics.collided,
                    delivered=metrics.delivered,
                    duration=metrics.duration,
                    collision_prob=metrics.collision_prob,
                    throughput=metrics.throughput,
                    observed_throughput=own,
                    offered_load=metrics.offered_load,
                    effective_load=metrics.effective_load,
                    state=step.state,
                    action=action,
                    probability=probability,
                    reward=step.reward,
                    epsilon=epsilon,
                    fairness=step.fairness,
                )
            )
            if cfg.trace_ledgers:
                for j in ledger.neighbors:
                    s_j, fresh = ledger.neighbor_throughput.get(j, (0.0, None))
                    self.ledger_dump.append(
                        (
                            now,
                            node,
                            j,
                            s_j,
                            fresh,
                            ledger.reported[j],
                            ledger.own_components.get(j, 0.0),
                        )
                    )

        self.closed[node] += 1
        if self.closed[node] >= cfg.epochs:
            self.remaining.discard(node)


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    """
    Run one scenario to completion. The result is fully determined by ``cfg``
    (seed included).
    """
    _log.info(
        "running %s: %s on %s, %d epochs, seed %d",
        cfg.name,
        cfg.mode,
        cfg.topology_name,
        cfg.epochs,
        cfg.seed,
    )
    started = time.monotonic()
    sim = _Simulation(cfg)
    sim_time = sim.run()

    rows = sorted(sim.rows, key=lambda r: (r.epoch, r.node))
    per_node: Dict[int, List[EpochRow]] = {}
    for r in rows:
        per_node.setdefault(r.node, []).append(r)

    summary = {
        n: summarize(node_rows, cfg.summary_fraction)
        for n, node_rows in sorted(per_node.items())
    }

    # Only epochs every reporting node reached make up `S(t)`
    common = min((len(v) for v in per_node.values()), default=0)
    network = [0.0] * common
    for r in rows:
        if r.epoch < common:
            network[r.epoch] += r.throughput

    result = RunResult(
        config=cfg,
        rows=rows,
        network=network,
        summary=summary,
        sim_time=sim_time,
        transmissions=sim.transmissions,
        ledgers=sim.ledger_dump,
    )
    _log.info(
        "finished %s in %.1fs: S = %.4f over %.0f packet durations",
        cfg.name,
        time.monotonic() - started,
        result.network_throughput,
        sim_time,
    )
    return result
