"""Small environments and reference implementations used as test oracles."""

import math

import numpy as np

from npgplay.env import GameEnv


class FixedState:
    """Stateless observation vector for single-state games."""

    def __init__(self, features):
        self.features = np.asarray(features, dtype=float)

    def copy(self):
        return FixedState(self.features.copy())


class BanditEnv(GameEnv):
    """Single-state game: agent i's reward depends only on its own action."""

    def __init__(self, reward_tables, discount=0.5, features=None):
        self.tables = np.asarray(reward_tables, dtype=float)  # (N, K)
        n, k = self.tables.shape
        super().__init__(n, k, discount, float(np.abs(self.tables).max()))
        if features is None:
            features = np.zeros(n)
        self._state = FixedState(features)

    def reset(self):
        self.clock = 0
        return self._state

    def step(self, joint_action):
        a = np.asarray(joint_action)
        self.clock += 1
        return self._state, self.tables[np.arange(self.num_agents), a]

    def get_state(self):
        return self._state.copy()

    def set_state(self, state):
        pass  # single state


class ZeroRewardEnv(BanditEnv):
    def __init__(self, n_agents=2, n_actions=2, discount=0.5):
        super().__init__(np.zeros((n_agents, n_actions)), discount)


class ConstantRewardEnv(BanditEnv):
    def __init__(self, c, n_agents=2, n_actions=2, discount=0.5):
        super().__init__(np.full((n_agents, n_actions), float(c)), discount)


_CHAIN_FEATURES = {}


class ChainState:
    def __init__(self, s, n_agents):
        self.s = int(s)
        feats = _CHAIN_FEATURES.get((self.s, n_agents))
        if feats is None:
            feats = np.full(n_agents, float(s))
            feats.flags.writeable = False
            _CHAIN_FEATURES[(self.s, n_agents)] = feats
        self.features = feats

    def copy(self):
        return ChainState(self.s, len(self.features))


class TwoStateChainEnv(GameEnv):
    """Two states, two agents, two actions; next-state law and rewards given
    by dense tables indexed (s, a1, a2). Exact values are solvable by a 2x2
    linear system, which the tests use as the oracle.
    """

    def __init__(self, rewards, p_next1, discount=0.8, seed=1234):
        self.rewards = np.asarray(rewards, dtype=float)  # (2, K, K, N)
        self.p_next1 = np.asarray(p_next1, dtype=float)  # (2, K, K)
        n = self.rewards.shape[3]
        k = self.rewards.shape[1]
        super().__init__(n, k, discount, float(np.abs(self.rewards).max()))
        self._rng = np.random.default_rng(seed)
        self.state = ChainState(0, n)

    def reset(self):
        self.state = ChainState(0, self.num_agents)
        self.clock = 0
        return self.state

    def step(self, joint_action):
        a1, a2 = int(joint_action[0]), int(joint_action[1])
        s = self.state.s
        r = self.rewards[s, a1, a2]
        nxt = 1 if self._rng.random() < self.p_next1[s, a1, a2] else 0
        self.state = ChainState(nxt, self.num_agents)
        self.clock += 1
        return self.state, r.copy()

    def get_state(self):
        return self.state.copy()

    def set_state(self, state):
        self.state = state.copy()


def chain_policy_matrix(env, params, kind):
    """pi[s, a1, a2]: joint action probabilities in each state (exact views)."""
    from npgplay.policy import all_policy_probs

    out = np.zeros((2, env.num_actions, env.num_actions))
    for s in range(2):
        probs = all_policy_probs(ChainState(s, env.num_agents), params, kind)
        out[s] = np.outer(probs[0], probs[1])
    return out


def chain_exact_values(env, params, kind):
    """Exact V (2, N) and Q (2, K, K, N) for fixed params on the chain."""
    pi = chain_policy_matrix(env, params, kind)
    gamma = env.discount
    n = env.num_agents
    # expected reward and next-state distribution per state
    r_bar = np.einsum("sab,sabn->sn", pi, env.rewards)
    p1 = np.einsum("sab,sab->s", pi, env.p_next1)
    p = np.stack([1 - p1, p1], axis=1)  # (2, 2) transition matrix
    v = np.linalg.solve(np.eye(2) - gamma * p, r_bar)  # (2, N)
    q = env.rewards + gamma * (
        env.p_next1[..., None] * v[1] + (1 - env.p_next1[..., None]) * v[0]
    )
    return v, q


def ref_policy_probs(i, theta, feats, networked):
    """Direct scalar-math reimplementation of the coupled softmax policy."""
    n_agents, k_actions = theta.shape[0], theta.shape[1]

    def logit(owner, k):
        z = theta[owner, k, 0] + theta[owner, k, 1] * feats[owner]
        if networked:
            xs = [
                theta[j, k, 0] + theta[j, k, 1] * feats[j]
                for j in range(n_agents)
                if j != owner
            ]
            z -= math.log(sum(math.exp(x) for x in xs) / len(xs))
        return z

    logits = [logit(i, k) for k in range(k_actions)]
    m = max(logits)
    exps = [math.exp(z - m) for z in logits]
    total = sum(exps)
    return np.array([e / total for e in exps])
