"""Multi-agent newsvendor game.

N vendors choose when to supply a periodic demand D. Time is periodic with
period N; a vendor "matches" at time t when its action equals t mod N. The
common reward penalizes demand mismatch (opportunity cost) and carried
inventory (storage cost); every agent receives the same reward, so the game
is an identical-interest Markov potential game.
"""

from dataclasses import dataclass
import itertools

import numpy as np

from .env import GameEnv


@dataclass(frozen=True)
class NewsvendorConfig:
    n_agents: int = 5
    demand: float = 1.0
    cost_opportunity: float = 0.3
    cost_storage: float = 0.1
    discount: float = 0.95
    initial_inventory: float = 1.0

    def __post_init__(self):
        if self.n_agents < 2:
            raise ValueError("n_agents must be >= 2")
        if self.demand <= 0:
            raise ValueError("demand must be > 0")
        if self.cost_opportunity < 0 or self.cost_storage < 0:
            raise ValueError("costs must be >= 0")
        if not 0.0 < self.discount < 1.0:
            raise ValueError("discount must be in (0, 1)")
        if self.initial_inventory < 0:
            raise ValueError("initial_inventory must be >= 0")


@dataclass
class InventoryState:
    """Joint inventory vector plus the phase of the demand cycle."""

    inventories: np.ndarray
    period: int = 0

    @property
    def features(self) -> np.ndarray:
        return self.inventories

    def copy(self):
        return InventoryState(self.inventories.copy(), self.period)


def nv_reward(state: InventoryState, joint_action, cfg: NewsvendorConfig) -> np.ndarray:
    """Common reward: -c_o/N * |M*D - D| - c_s/N * sum(inventories).

    M is the number of agents whose action matches the current period.
    Returns a length-N vector with identical entries.
    """
    a = np.asarray(joint_action)
    matches = int(np.count_nonzero(a == state.period))
    d = cfg.demand
    mismatch = abs(matches * d - d)
    r = (-cfg.cost_opportunity * mismatch - cfg.cost_storage * state.inventories.sum()) / cfg.n_agents
    return np.full(cfg.n_agents, r)


def nv_transition(state: InventoryState, joint_action, cfg: NewsvendorConfig) -> InventoryState:
    """Inventory dynamics: matching agents restock to max{D, s} and share the
    demand equally; non-matching inventories are unchanged. The period advances
    by one modulo N.
    """
    a = np.asarray(joint_action)
    match = a == state.period
    m = int(np.count_nonzero(match))
    inv = state.inventories.copy()
    if m > 0:
        d = cfg.demand
        inv[match] = np.maximum(d, inv[match]) - d / m
    return InventoryState(inv, (state.period + 1) % cfg.n_agents)


class NewsvendorEnv(GameEnv):
    """GameEnv wrapper around the newsvendor reward and dynamics."""

    def __init__(self, cfg: NewsvendorConfig = NewsvendorConfig()):
        n = cfg.n_agents
        # worst case: zero matching sellers and every inventory at max{D, s0}
        bound = (cfg.cost_opportunity * max(n - 1, 1) * cfg.demand
                 + cfg.cost_storage * n * max(cfg.demand, cfg.initial_inventory)) / n
        super().__init__(n, n, cfg.discount, bound)
        self.cfg = cfg
        self.state = self.reset()

    def reset(self) -> InventoryState:
        self.state = InventoryState(
            np.full(self.cfg.n_agents, float(self.cfg.initial_inventory)), 0
        )
        self.clock = 0
        return self.state

    def step(self, joint_action):
        a = self.check_actions(joint_action)
        rewards = nv_reward(self.state, a, self.cfg)
        self.state = nv_transition(self.state, a, self.cfg)
        self.clock += 1
        return self.state, rewards

    def get_state(self) -> InventoryState:
        return self.state.copy()

    def set_state(self, state: InventoryState):
        self.state = state.copy()


def _state_key(state: InventoryState, decimals: int = 12):
    return (tuple(np.round(state.inventories, decimals)), state.period)


def nv_exact_value(cfg: NewsvendorConfig, policy_fn, tol: float = 1e-10,
                   max_states: int = 20000) -> np.ndarray:
    """Per-agent value of a fixed joint policy at the initial state.

    ``policy_fn(state) -> (N, K)`` gives each agent's action distribution.
    The reachable inventory set under the max/share dynamics is finite for
    fixed N, so we enumerate it from the initial state and iterate the Bellman
    fixed point until successive sweeps differ by less than ``tol``.
    """
    n = cfg.n_agents
    start = InventoryState(np.full(n, float(cfg.initial_inventory)), 0)
    joint_actions = list(itertools.product(range(n), repeat=n))

    # breadth-first enumeration of reachable states under any positive-
    # probability action profile of the given policy
    states = {}
    frontier = [start]
    states[_state_key(start)] = start
    transitions = {}  # key -> list of (prob, rewards, next_key)
    while frontier:
        st = frontier.pop()
        key = _state_key(st)
        probs = np.asarray(policy_fn(st))
        rows = []
        for a in joint_actions:
            p = 1.0
            for i in range(n):
                p *= probs[i, a[i]]
            if p == 0.0:
                continue
            r = nv_reward(st, np.array(a), cfg)
            nxt = nv_transition(st, np.array(a), cfg)
            nkey = _state_key(nxt)
            if nkey not in states:
                if len(states) >= max_states:
                    raise RuntimeError(
                        f"reachable-state enumeration exceeded {max_states} states"
                    )
                states[nkey] = nxt
                frontier.append(nxt)
            rows.append((p, r, nkey))
        transitions[key] = rows

    values = {k: np.zeros(n) for k in states}
    gamma = cfg.discount
    while True:
        delta = 0.0
        new_values = {}
        for key, rows in transitions.items():
            v = np.zeros(n)
            for p, r, nkey in rows:
                v += p * (r + gamma * values[nkey])
            new_values[key] = v
            delta = max(delta, float(np.max(np.abs(v - values[key]))))
        values = new_values
        if delta < tol:
            break
    return values[_state_key(start)]
