"""
Event driven, unslotted channel.

A transmission ``i -> j`` occupying ``[start, start + duration)`` is delivered
iff no other transmission by a node in ``neighbors(j) | {j}`` overlaps it.
That single rule covers both hidden terminals (any other sender heard by `j`)
and half duplex (`j` transmitting itself). There is no capture and no
propagation delay, and a collided packet is lost.
"""
import enum
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Sequence, Tuple

from .errors import SimulationOrderError, TopologyError
from .topology import Topology

PACKET_DURATION = 1.0


class Outcome(enum.Enum):
    PENDING = "pending"
    DELIVERED = "delivered"
    COLLIDED = "collided"
    WITHHELD = "withheld"


@dataclass
class TransmissionRecord:
    sender: int
    receiver: int
    start: float
    duration: float = PACKET_DURATION
    outcome: Outcome = Outcome.PENDING

    # Epoch of the sender in which the packet was generated, assigned on submit
    epoch: int = 0

    # Piggybacked control fields, opaque to the channel
    payload: Any = field(default=None, repr=False, compare=False)

    # Whether an overlapping transmission has been heard at the receiver
    interfered: bool = field(default=False, repr=False, compare=False)

    @property
    def end(self) -> float:
        return self.start + self.duration

    def overlaps(self, other: "TransmissionRecord") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class EpochMetrics:
    node: int
    epoch: int
    generated: int
    transmitted: int
    collided: int
    delivered: int
    duration: float

    def __post_init__(self):
        if self.transmitted != self.collided + self.delivered:
            raise ValueError(
                f"node {self.node} epoch {self.epoch}: {self.transmitted} transmitted "
                f"but {self.collided} collided and {self.delivered} delivered"
            )
        if self.transmitted > self.generated:
            raise ValueError(
                f"node {self.node} epoch {self.epoch}: transmitted more than generated"
            )

    @property
    def withheld(self) -> int:
        return self.generated - self.transmitted

    @property
    def collision_prob(self) -> float:
        if self.transmitted == 0:
            return 0.0
        return self.collided / self.transmitted

    @property
    def throughput(self) -> float:
        if self.duration <= 0:
            return 0.0
        return self.delivered / self.duration

    @property
    def offered_load(self) -> float:
        if self.duration <= 0:
            return 0.0
        return self.generated / self.duration

    @property
    def effective_load(self) -> float:
        if self.duration <= 0:
            return 0.0
        return self.transmitted / self.duration


@dataclass
class _Tally:
    generated: int = 0
    transmitted: int = 0
    collided: int = 0
    delivered: int = 0


class Channel:
    """
    Channel state of a single run. It is mutated only by that run's event
    loop; transmissions must be submitted in non-decreasing start order.
    """

    def __init__(self, topo: Topology):
        self._topo = topo
        # Transmitters whose signal reaches each node, the node itself included
        self._hears = tuple(
            frozenset(topo.neighbors(n)) | {n} for n in topo.nodes
        )
        self._now = 0.0
        self._active: List[TransmissionRecord] = []

        # Counters are kept per (node, epoch) because the packets of an epoch
        # finish resolving after the next epoch has already started.
        self._tallies: Dict[Tuple[int, int], _Tally] = defaultdict(_Tally)
        self._open = [0] * topo.node_count
        self._closing = [0] * topo.node_count
        self._last_close = [0.0] * topo.node_count

    @property
    def topology(self) -> Topology:
        return self._topo

    @property
    def now(self) -> float:
        return self._now

    def open_epoch(self, node) -> int:
        return self._open[node]

    def pending(self) -> int:
        return len(self._active)

    def note_generated(self, node) -> int:
        epoch = self._open[node]
        self._tallies[node, epoch].generated += 1
        return epoch

    def roll_epoch(self, node):
        # The node reached its quota; later arrivals count toward the next epoch
        self._open[node] += 1

    def submit(self, tx: TransmissionRecord):
        if tx.outcome is not Outcome.PENDING:
            raise SimulationOrderError(f"cannot submit a {tx.outcome.value} transmission")
        if tx.start < self._now:
            raise SimulationOrderError(
                f"transmission {tx.sender}->{tx.receiver} starts at {tx.start} "
                f"but the channel is already at {self._now}"
            )
        if tx.receiver == tx.sender or tx.receiver not in self._hears[tx.sender]:
            raise TopologyError(
                f"node {tx.receiver} is not a neighbour of sender {tx.sender}"
            )

        self._now = tx.start
        tx.epoch = self._open[tx.sender]
        self._tallies[tx.sender, tx.epoch].transmitted += 1

        hears_rx = self._hears[tx.receiver]
        for other in self._active:
            if not tx.overlaps(other):
                continue
            if other.sender in hears_rx:
                tx.interfered = True
            if tx.sender in self._hears[other.receiver]:
                other.interfered = True

        self._active.append(tx)

    def resolve(self, up_to: float) -> List[TransmissionRecord]:
        """
        Finalize every transmission that ended by ``up_to``. Nothing starting
        before ``up_to`` may be submitted afterwards, so no later transmission
        can change their outcome.
        """
        if up_to < self._now:
            raise SimulationOrderError(
                f"cannot resolve up to {up_to}, the channel is already at {self._now}"
            )
        self._now = up_to

        finished = [tx for tx in self._active if tx.end <= up_to]
        if not finished:
            return finished

        self._active = [tx for tx in self._active if tx.end > up_to]
        finished.sort(key=lambda tx: (tx.start, tx.sender))
        for tx in finished:
            tally = self._tallies[tx.sender, tx.epoch]
            if tx.interfered:
                tx.outcome = Outcome.COLLIDED
                tally.collided += 1
            else:
                tx.outcome = Outcome.DELIVERED
                tally.delivered += 1
        return finished

    def close_epoch(self, node) -> EpochMetrics:
        epoch = self._closing[node]
        for tx in self._active:
            if tx.sender == node and tx.epoch == epoch:
                raise SimulationOrderError(
                    f"node {node} epoch {epoch} still has transmissions in flight"
                )
        if epoch == self._open[node]:
            self.roll_epoch(node)

        tally = self._tallies.pop((node, epoch), _Tally())
        metrics = EpochMetrics(
            node=node,
            epoch=epoch,
            generated=tally.generated,
            transmitted=tally.transmitted,
            collided=tally.collided,
            delivered=tally.delivered,
            duration=self._now - self._last_close[node],
        )
        self._closing[node] += 1
        self._last_close[node] = self._now
        return metrics


def resolve_schedule(schedule: Sequence[TransmissionRecord], topo: Topology) -> List[Outcome]:
    """
    Resolve a finite schedule through a fresh `Channel` and return the
    outcomes in the order of ``schedule``. The input records are not mutated.
    """
    copies = [replace(tx, outcome=Outcome.PENDING, interfered=False) for tx in schedule]
    order = sorted(range(len(copies)), key=lambda i: (copies[i].start, copies[i].sender))

    channel = Channel(topo)
    for i in order:
        channel.submit(copies[i])
    channel.resolve(max((tx.end for tx in copies), default=0.0))
    return [tx.outcome for tx in copies]
