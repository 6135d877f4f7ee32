"""
MAC layer offered load: Poisson arrivals per node, with destinations drawn
uniformly among the node's 1-hop neighbours.

Arrivals are not queued. Every arrival is a fresh packet offered to the MAC at
its arrival instant and it either goes on the air or is dropped.
"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import ConfigError


def node_rng(seed, node) -> np.random.Generator:
    """
    The random stream owned by ``node`` within a scenario seeded with ``seed``.

    Streams are derived from ``(seed, node)`` so adding nodes to a scenario
    never perturbs the streams of the others.
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(int(node),))
    )


def next_interarrival(rng: np.random.Generator, load_erlang: float) -> float:
    # Time is measured in packet durations, so a load of `g` Erlang is `g`
    # arrivals per unit of time.
    if load_erlang < 0:
        raise ValueError(f"load must be non-negative: {load_erlang}")
    if load_erlang == 0:
        return math.inf
    return float(rng.exponential(1.0 / load_erlang))


def pick_destination(rng: np.random.Generator, nbrs: Sequence[int]) -> int:
    if not nbrs:
        raise ConfigError("cannot pick a destination from an empty neighbour set")
    return nbrs[min(int(rng.random() * len(nbrs)), len(nbrs) - 1)]


@dataclass(frozen=True)
class TrafficSource:
    node: int
    load_erlang: float
    # `(activation time, load)` pairs, times strictly increasing. The initial
    # `load_erlang` applies until the first activation.
    schedule: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if not self.load_erlang >= 0:
            raise ConfigError(f"node {self.node} has a negative load {self.load_erlang}")

        previous = -math.inf
        for time, load in self.schedule:
            if not time > previous:
                raise ConfigError(
                    f"node {self.node} schedule times must be strictly increasing"
                )
            if not load >= 0:
                raise ConfigError(f"node {self.node} schedule has a negative load {load}")
            previous = time

    def ever_active(self) -> bool:
        return self.load_erlang > 0 or any(load > 0 for _, load in self.schedule)
