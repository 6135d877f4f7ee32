"""
Per-node Hysteretic Q-learning.

Each node observes its epoch collision probability (the state), picks a
transmit probability (the action) and is rewarded on the direction in which
its own throughput and its neighbourhood fairness moved since the last epoch.
Two learning rates are used: ``alpha`` when the temporal difference is
non-negative and the smaller ``beta`` otherwise, so that penalties caused by
other agents exploring weigh less than rewards.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError

STATE_COUNT = 24
ACTION_COUNT = 20

HYSTERETIC = "hysteretic"
CLASSIC = "classic"

# (throughput went up, fairness went up) -> reward
REWARDS = {
    (True, True): 50.0,
    (True, False): -30.0,
    (False, True): 10.0,
    (False, False): -50.0,
}

_log = logging.getLogger(__name__)


@dataclass
class QTable:
    values: np.ndarray = field(
        default_factory=lambda: np.zeros((STATE_COUNT, ACTION_COUNT), dtype=float)
    )
    visit_counts: np.ndarray = field(
        default_factory=lambda: np.zeros((STATE_COUNT, ACTION_COUNT), dtype=np.int64)
    )

    def __post_init__(self):
        shape = (STATE_COUNT, ACTION_COUNT)
        if self.values.shape != shape or self.visit_counts.shape != shape:
            raise ValueError(f"Q-tables are {shape}, got {self.values.shape}")


@dataclass(frozen=True)
class AgentConfig:
    alpha: float = 0.9
    beta: float = 0.1
    gamma: float = 0.95
    epsilon_start: float = 1.0
    epsilon_decay: float = 1000.0
    delta_margin: float = 0.005
    zero_throughput_penalty: float = 0.8
    # 1.0 subtracts the penalty literally; 50.0 reads it as a fraction of the
    # largest reward.
    penalty_scale: float = 1.0
    learner: str = HYSTERETIC

    def __post_init__(self):
        if self.learner not in (HYSTERETIC, CLASSIC):
            raise ConfigError(f"unknown learner {self.learner!r}")
        if not 0 < self.alpha <= 1:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 < self.beta <= 1:
            raise ConfigError(f"beta must be in (0, 1], got {self.beta}")
        if self.learner == HYSTERETIC and not self.beta < self.alpha:
            raise ConfigError(
                f"hysteretic learning needs beta < alpha, got {self.beta} >= {self.alpha}"
            )
        if self.learner == CLASSIC and self.beta != self.alpha:
            raise ConfigError("the classic learner uses a single rate, set beta = alpha")
        if not 0 <= self.gamma < 1:
            raise ConfigError(f"gamma must be in [0, 1), got {self.gamma}")
        if not 0 <= self.epsilon_start <= 1:
            raise ConfigError(f"epsilon_start must be in [0, 1], got {self.epsilon_start}")
        if not self.epsilon_decay > 0:
            raise ConfigError(f"epsilon_decay must be positive, got {self.epsilon_decay}")
        if not self.delta_margin >= 0:
            raise ConfigError(f"delta_margin must be non-negative, got {self.delta_margin}")

    @classmethod
    def classic(cls, alpha=0.9, **kwargs) -> "AgentConfig":
        return cls(alpha=alpha, beta=alpha, learner=CLASSIC, **kwargs)

    def epsilon(self, epoch_id) -> float:
        return exploration_epsilon(epoch_id, self.epsilon_start, self.epsilon_decay)


@dataclass
class AgentState:
    node: int
    current_state: int = 0
    current_action: int = ACTION_COUNT
    prev_throughput: float = 0.0
    prev_fairness: float = 0.0
    epoch_id: int = 0

    def __post_init__(self):
        if not 0 <= self.current_state < STATE_COUNT:
            raise ValueError(f"state {self.current_state} out of range")
        action_probability(self.current_action)


def discretize_state(collision_prob) -> int:
    if not 0.0 <= collision_prob <= 1.0:
        raise ValueError(f"collision probability {collision_prob} outside [0, 1]")
    return min(int(math.floor(collision_prob * STATE_COUNT)), STATE_COUNT - 1)


def action_probability(action_id) -> float:
    # IDs are 1..20, p = 0 is not an action
    if not isinstance(action_id, (int, np.integer)) or not 1 <= action_id <= ACTION_COUNT:
        raise ValueError(f"action ID {action_id} outside 1..{ACTION_COUNT}")
    return action_id / ACTION_COUNT


def select_action(q: QTable, state, epsilon, rng: np.random.Generator) -> int:
    """
    Epsilon-greedy choice returning a 1-based action ID. Exploitation ties go
    to the lowest action ID.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon {epsilon} outside [0, 1]")

    if rng.random() < epsilon:
        return int(rng.integers(ACTION_COUNT)) + 1
    # `argmax` returns the first maximum
    return int(np.argmax(q.values[state])) + 1


def exploration_epsilon(epoch_id, start=1.0, decay=1000.0) -> float:
    if epoch_id < 0:
        raise ValueError(f"negative epoch ID {epoch_id}")
    return start * math.exp(-epoch_id / decay)


def fairness(own_throughput, neighbor_throughputs: Sequence[float]) -> float:
    # 0 is perfectly fair, more negative is less fair
    if not neighbor_throughputs:
        raise ConfigError("fairness needs at least one neighbour")
    return -sum(abs(own_throughput - s) for s in neighbor_throughputs)


def compute_reward(delta_s, delta_f, cfg: AgentConfig, throughput_is_zero) -> float:
    # Exact zeros count as improvements
    reward = REWARDS[delta_s - cfg.delta_margin >= 0, delta_f >= 0]
    if throughput_is_zero:
        reward -= cfg.zero_throughput_penalty * cfg.penalty_scale
    return reward


def hysteretic_update(q: QTable, s, a, r, s_next, cfg: AgentConfig) -> QTable:
    """
    Update ``Q(s, a)`` in place and return ``q``. ``a`` is a 1-based action ID.
    No other cell changes.
    """
    col = a - 1
    delta = r + cfg.gamma * q.values[s_next].max() - q.values[s, col]
    rate = cfg.alpha if delta >= 0 else cfg.beta
    q.values[s, col] += rate * delta
    q.visit_counts[s, col] += 1
    return q


@dataclass(frozen=True)
class LearningStep:
    node: int
    epoch: int
    state: int
    action: int
    probability: float
    reward: float
    epsilon: float
    fairness: float
    throughput: float


class Agent:
    """
    The learner of one node. ``step`` is called once per closed epoch with the
    epoch's collision probability and the throughputs the node knows about.
    """

    def __init__(self, node, cfg: AgentConfig, rng: np.random.Generator, *, learning=True):
        self.cfg = cfg
        self.q = QTable()
        self.state = AgentState(node=node)
        self._rng = rng
        self._learning = learning

        if learning:
            self.state.current_action = select_action(
                self.q, self.state.current_state, cfg.epsilon(0), rng
            )

    @property
    def probability(self) -> float:
        return action_probability(self.state.current_action)

    @property
    def action(self) -> int:
        return self.state.current_action

    def step(
        self,
        collision_prob,
        own_throughput,
        neighbor_throughputs: Sequence[float],
    ) -> LearningStep:
        st = self.state
        epoch = st.epoch_id
        s_next = discretize_state(collision_prob)
        f = fairness(own_throughput, neighbor_throughputs)

        if self._learning:
            reward = compute_reward(
                own_throughput - st.prev_throughput,
                f - st.prev_fairness,
                self.cfg,
                own_throughput == 0,
            )
            # `CLASSIC` configs carry beta == alpha
            hysteretic_update(
                self.q, st.current_state, st.current_action, reward, s_next, self.cfg
            )
        else:
            reward = 0.0

        # The epoch just closed becomes `t - 1` for the next one
        st.prev_throughput = own_throughput
        st.prev_fairness = f
        st.current_state = s_next
        st.epoch_id += 1

        epsilon = self.cfg.epsilon(st.epoch_id) if self._learning else 0.0
        if self._learning:
            st.current_action = select_action(self.q, s_next, epsilon, self._rng)

        _log.debug(
            "node %d epoch %d: state %d reward %.1f next action %d",
            st.node,
            epoch,
            s_next,
            reward,
            st.current_action,
        )
        return LearningStep(
            node=st.node,
            epoch=epoch,
            state=s_next,
            action=st.current_action,
            probability=self.probability,
            reward=reward,
            epsilon=epsilon,
            fairness=f,
            throughput=own_throughput,
        )
