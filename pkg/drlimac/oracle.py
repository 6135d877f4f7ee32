"""
Independent validators for the simulator.

Nothing here reuses the simulator's own code paths: collisions are checked
pairwise without an event queue, and the learning inputs are recomputed from
raw counters with their own arithmetic.
"""
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

from .channel import Outcome, TransmissionRecord
from .errors import ValidationError
from .topology import Topology

_TINY = 1e-12


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    analytic: float
    simulated: float

    @property
    def relative_error(self) -> float:
        return abs(self.simulated - self.analytic) / max(abs(self.analytic), _TINY)

    def row(self):
        return (self.quantity, self.analytic, self.simulated, self.relative_error)


def aloha_throughput(total_load) -> float:
    # Unslotted ALOHA: a packet survives a vulnerable period of two durations
    if total_load < 0:
        raise ValueError(f"negative load {total_load}")
    return total_load * math.exp(-2.0 * total_load)


def brute_force_resolve(schedule: Sequence[TransmissionRecord], topo: Topology) -> List[Outcome]:
    outcomes = []
    for i, tx in enumerate(schedule):
        # Transmitters heard at the receiver, the receiver included
        heard = set(topo.neighbors(tx.receiver))
        heard.add(tx.receiver)

        collided = False
        for k, other in enumerate(schedule):
            if k == i:
                continue
            overlap = (
                other.start < tx.start + tx.duration
                and tx.start < other.start + other.duration
            )
            if overlap and other.sender in heard:
                collided = True
                break
        outcomes.append(Outcome.COLLIDED if collided else Outcome.DELIVERED)
    return outcomes


class EpochTrace(NamedTuple):
    transmitted: Optional[int]
    collided: Optional[int]
    delivered: Optional[int]
    duration: Optional[float]
    neighbor_throughputs: Optional[Sequence[float]]
    prev_throughput: float = 0.0
    prev_fairness: float = 0.0
    delta_margin: float = 0.005
    zero_throughput_penalty: float = 0.8
    penalty_scale: float = 1.0


class Recomputed(NamedTuple):
    collision_prob: float
    throughput: float
    fairness: float
    reward: float


def recompute_epoch(trace: EpochTrace) -> Recomputed:
    missing = [
        name
        for name in ("transmitted", "collided", "delivered", "duration", "neighbor_throughputs")
        if getattr(trace, name) is None
    ]
    if missing:
        raise ValidationError(f"epoch trace is missing {', '.join(missing)}")
    if trace.collided + trace.delivered != trace.transmitted:
        raise ValidationError(
            f"{trace.transmitted} transmitted but {trace.collided} collided "
            f"and {trace.delivered} delivered"
        )
    if not trace.neighbor_throughputs:
        raise ValidationError("epoch trace has no neighbour throughputs")

    collision_prob = trace.collided / trace.transmitted if trace.transmitted else 0.0
    throughput = trace.delivered / trace.duration if trace.duration > 0 else 0.0
    fairness = 0.0
    for s in trace.neighbor_throughputs:
        fairness -= abs(throughput - s)

    # Rows of the reward table: (+,+) 50, (+,-) -30, (-,+) 10, (-,-) -50
    gaining = (throughput - trace.prev_throughput) - trace.delta_margin >= 0
    fairer = (fairness - trace.prev_fairness) >= 0
    if gaining:
        reward = 50.0 if fairer else -30.0
    else:
        reward = 10.0 if fairer else -50.0
    if throughput == 0:
        reward -= trace.zero_throughput_penalty * trace.penalty_scale

    return Recomputed(collision_prob, throughput, fairness, reward)
