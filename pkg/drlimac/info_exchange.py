"""
Localized throughput sharing by piggybacking.

Node ``i`` counts the packets it received intact from each neighbour ``j``.
When its reporting period closes, the counts become rates ``s_{j->i}``, and
every data packet ``i`` sends afterwards carries those rates together with
``i``'s own latest throughput. A node therefore learns its own throughput
``s_j = sum_i s_{j->i}`` from what its neighbours report back, and it learns
each neighbour's throughput from that neighbour's packets. Nothing is ever
known about nodes further than one hop away.
"""
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .errors import TopologyError


@dataclass(frozen=True)
class PiggybackPayload:
    sender_throughput: float
    # `{neighbour: s_{neighbour->sender}}` for every neighbour of the sender
    reverse_reports: Mapping[int, float]

    def field_count(self) -> int:
        return 1 + len(self.reverse_reports)


class PiggybackLedger:
    def __init__(self, owner, neighbors: Iterable[int]):
        self.owner = owner
        self._neighbors = tuple(sorted(neighbors))
        if not self._neighbors:
            raise TopologyError(f"node {owner} has no neighbours to exchange with")

        self.delivered_from: Dict[int, int] = {j: 0 for j in self._neighbors}
        # Rates computed at the last period close, reported back to each sender
        self.reported: Dict[int, float] = {j: 0.0 for j in self._neighbors}
        # `{neighbour: (throughput, freshness)}`, missing until first heard
        self.neighbor_throughput: Dict[int, Tuple[float, int]] = {}
        # `{neighbour: s_{owner->neighbour}}` as last reported by the neighbour
        self.own_components: Dict[int, float] = {}
        self.own_throughput = 0.0

        self._payload: Optional[PiggybackPayload] = None

    @property
    def neighbors(self) -> Tuple[int, ...]:
        return self._neighbors

    def _check_neighbor(self, node):
        if node not in self.delivered_from:
            raise TopologyError(
                f"node {node} is not a 1-hop neighbour of node {self.owner}"
            )

    def record_reception(self, sender):
        # Only packets delivered to the owner are counted
        self._check_neighbor(sender)
        self.delivered_from[sender] += 1

    def close_period(self, duration):
        for j, count in self.delivered_from.items():
            self.reported[j] = count / duration if duration > 0 else 0.0
            self.delivered_from[j] = 0
        self._payload = None

    def build_payload(self) -> PiggybackPayload:
        # Payloads only change at period close or when reports come in, so the
        # same immutable value is shared by every packet in between
        if self._payload is None:
            self._payload = PiggybackPayload(
                sender_throughput=self.own_throughput,
                reverse_reports=dict(self.reported),
            )
        return self._payload

    def ingest_payload(self, sender, payload: PiggybackPayload, now):
        self._check_neighbor(sender)
        self.neighbor_throughput[sender] = (payload.sender_throughput, now)

        component = payload.reverse_reports.get(self.owner)
        if component is not None and self.own_components.get(sender) != component:
            self.own_components[sender] = component
            self.own_throughput = sum(self.own_components.values())
            self._payload = None

    def neighbor_throughputs(self, default=0.0):
        # Neighbours never heard from count as `default`
        return [
            self.neighbor_throughput.get(j, (default, None))[0] for j in self._neighbors
        ]

    def freshness(self, neighbor) -> Optional[int]:
        entry = self.neighbor_throughput.get(neighbor)
        return None if entry is None else entry[1]


def record_reception(ledger: PiggybackLedger, sender) -> PiggybackLedger:
    ledger.record_reception(sender)
    return ledger


def build_payload(ledger: PiggybackLedger) -> PiggybackPayload:
    return ledger.build_payload()


def ingest_payload(ledger: PiggybackLedger, sender, payload: PiggybackPayload, now) -> PiggybackLedger:
    ledger.ingest_payload(sender, payload, now)
    return ledger
