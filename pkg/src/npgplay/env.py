"""Markov-game environment contract.

A game environment owns an opaque state plus a period clock and is advanced
sequentially by one training iteration at a time. States must expose a
``features`` vector with one scalar observation per agent; policies consume
these features.
"""

import abc

import numpy as np


class GameEnv(abc.ABC):
    """Contract for an N-agent Markov game with a common discrete action set.

    Attributes
    ----------
    num_agents : int
        Number of agents N (at least 2).
    num_actions : int
        Common per-agent action count K (at least 1).
    discount : float
        Discount rate strictly inside (0, 1).
    reward_bound : float
        Bound R with |r_i(s, a)| <= R for every state and joint action.
    """

    def __init__(self, num_agents: int, num_actions: int, discount: float,
                 reward_bound: float):
        if num_agents < 2:
            raise ValueError(f"need at least 2 agents, got {num_agents}")
        if num_actions < 1:
            raise ValueError(f"need at least 1 action, got {num_actions}")
        if not 0.0 < discount < 1.0:
            raise ValueError(f"discount must be in (0, 1), got {discount}")
        self.num_agents = num_agents
        self.num_actions = num_actions
        self.discount = discount
        self.reward_bound = float(reward_bound)
        self.clock = 0

    @abc.abstractmethod
    def reset(self):
        """Draw a state from the initial distribution and zero the clock."""

    @abc.abstractmethod
    def step(self, joint_action):
        """Advance one period; return (next_state, rewards of length N)."""

    @abc.abstractmethod
    def get_state(self):
        """Snapshot of the current state (safe to hold across steps)."""

    @abc.abstractmethod
    def set_state(self, state):
        """Re-seat the environment at a snapshotted state."""

    def check_actions(self, joint_action):
        a = np.asarray(joint_action)
        if a.shape != (self.num_agents,):
            raise ValueError(
                f"joint action must have shape ({self.num_agents},), got {a.shape}"
            )
        if (a < 0).any() or (a >= self.num_actions).any():
            raise ValueError(f"action index out of range [0, {self.num_actions}): {a}")
        return a
