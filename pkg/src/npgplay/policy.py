"""Coupled softmax policies and their score functions.

Each agent i keeps a K x 2 parameter block theta_i: per action k an intercept
theta_i[k, 0] and a coefficient theta_i[k, 1] on its own scalar observation
s_i. The networked variant couples agents through a mellow-max (log-mean-exp)
of the other agents' per-action scores; the independent variant drops that
term. Parameter views are arrays of shape (N, K, 2); an agent evaluates every
policy under its own belief view.
"""

import numpy as np

NETWORKED = "networked"
INDEPENDENT = "independent"
POLICY_KINDS = (NETWORKED, INDEPENDENT)


def check_kind(kind: str) -> str:
    if kind not in POLICY_KINDS:
        raise ValueError(f"unknown policy kind {kind!r}, expected one of {POLICY_KINDS}")
    return kind


def mellow_max(values) -> float:
    """log-mean-exp, a differentiable surrogate for max. Overflow-safe."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("mellow_max of an empty sequence")
    c = x.max()
    return float(c + np.log(np.mean(np.exp(x - c))))


def init_params(n_agents: int, n_actions: int, stream, std: float = 0.3) -> np.ndarray:
    """Draw initial parameters i.i.d. normal(0, std), shape (N, K, 2)."""
    return stream.rng.normal(0.0, std, size=(n_agents, n_actions, 2))


def _per_action_scores(view: np.ndarray, feats: np.ndarray) -> np.ndarray:
    """x[j, k] = theta_j[k, 0] + theta_j[k, 1] * s_j, shape (N, K)."""
    return view[:, :, 0] + view[:, :, 1] * feats[:, None]


def _exclusive_sums(e: np.ndarray) -> np.ndarray:
    """excl[n] = sum_{j != n} e[j] along the leading axis, summed directly.

    Subtracting e[n] from the total would cancel catastrophically when one
    agent dominates the exponentials; a masked matmul keeps every entry exact
    and guarantees e[i] <= excl[n] for i != n.
    """
    n = e.shape[0]
    mask = 1.0 - np.eye(n)
    return np.maximum(mask @ e.reshape(n, -1), 1e-300).reshape(e.shape)


def all_policy_probs(state, view: np.ndarray, kind: str) -> np.ndarray:
    """Action probabilities of every agent's policy under one parameter view.

    Returns an (N, K) array whose row n is pi_n(. | state) evaluated with the
    parameters in ``view``.
    """
    feats = state.features
    x = _per_action_scores(view, feats)
    n = x.shape[0]
    if kind == NETWORKED:
        c = x.max(axis=0)
        e = np.exp(x - c)
        excl = _exclusive_sums(e)  # (N, K): sum over j != n per owner n
        z = x - (np.log(excl / (n - 1)) + c)
    else:
        z = x
    z = z - z.max(axis=1, keepdims=True)
    p = np.exp(z)
    p /= p.sum(axis=1, keepdims=True)
    return p


def policy_probs(i: int, state, view: np.ndarray, kind: str) -> np.ndarray:
    """Agent i's action distribution under the given parameter view."""
    return all_policy_probs(state, view, kind)[i]


def joint_policy_probs(state, belief_views: np.ndarray, kind: str) -> np.ndarray:
    """Each agent's own policy under its own belief view.

    ``belief_views`` has shape (N, N, K, 2); row i is the parameter set agent i
    believes. Returns (N, K) with row i = pi_i under view i.
    """
    feats = state.features
    n = belief_views.shape[0]
    # x[i, j, k]: per-action score of agent j as seen by agent i
    x = belief_views[:, :, :, 0] + belief_views[:, :, :, 1] * feats[None, :, None]
    idx = np.arange(n)
    own = x[idx, idx]  # (N, K)
    if kind == NETWORKED:
        c = x.max(axis=1)  # (N, K)
        e = np.exp(x - c[:, None, :])
        mask = 1.0 - np.eye(n)
        excl = np.maximum(np.einsum("ij,ijk->ik", mask, e), 1e-300)
        z = own - (np.log(excl / (n - 1)) + c)
    else:
        z = own
    z = z - z.max(axis=1, keepdims=True)
    p = np.exp(z)
    p /= p.sum(axis=1, keepdims=True)
    return p


def _inverse_cdf(probs: np.ndarray, u: float) -> int:
    acc = 0.0
    last = len(probs) - 1
    for k in range(last):
        acc += probs[k]
        if u < acc:
            return k
    return last


def sample_action(i: int, state, view: np.ndarray, kind: str, stream) -> int:
    """Inverse-CDF sample from agent i's policy; deterministic given stream."""
    probs = policy_probs(i, state, view, kind)
    return _inverse_cdf(probs, stream.rng.random())


def sample_joint_action(state, belief_views: np.ndarray, kind: str,
                        streams) -> np.ndarray:
    """Sample every agent's action, each from its own belief view and stream."""
    probs = joint_policy_probs(state, belief_views, kind)
    n = probs.shape[0]
    actions = np.empty(n, dtype=np.int64)
    for i in range(n):
        actions[i] = _inverse_cdf(probs[i], streams[i].rng.random())
    return actions


def score_function(i: int, n: int, a_n: int, state, view: np.ndarray,
                   kind: str) -> np.ndarray:
    """Gradient of log pi_n(a_n | state) with respect to theta_i.

    Returns a flat vector of length 2K ordered (theta_i[0,0], theta_i[0,1],
    theta_i[1,0], ...). For the independent kind the cross blocks (n != i)
    are identically zero.
    """
    check_kind(kind)
    feats = state.features
    x = _per_action_scores(view, feats)
    k_actions = x.shape[1]
    probs = all_policy_probs(state, view, kind)[n]
    d = -probs
    d[a_n] += 1.0
    grad = np.zeros((k_actions, 2))
    if n == i:
        grad[:, 0] = d
        grad[:, 1] = feats[i] * d
    elif kind == NETWORKED:
        c = x.max(axis=0)
        e = np.exp(x - c)
        excl = _exclusive_sums(e)[n]
        w_i = e[i] / excl
        grad[:, 0] = -d * w_i
        grad[:, 1] = -feats[i] * d * w_i
    return grad.reshape(-1)


def score_sum(i: int, state, joint_action, view: np.ndarray, kind: str) -> np.ndarray:
    """sum_n grad_i log pi_n(a_n | state) under one view, shape (K, 2)."""
    feats = state.features
    if kind != NETWORKED:
        # only agent i's own policy depends on theta_i
        xi = view[i, :, 0] + view[i, :, 1] * feats[i]
        zi = xi - xi.max()
        pi = np.exp(zi)
        grad_int = pi / (-pi.sum())
        grad_int[joint_action[i]] += 1.0
        k = grad_int.shape[0]
    else:
        x = _per_action_scores(view, feats)
        n, k = x.shape
        c = x.max(axis=0)
        e = np.exp(x - c)
        excl = _exclusive_sums(e)
        z = x - (np.log(excl / (n - 1)) + c)
        z = z - z.max(axis=1, keepdims=True)
        p = np.exp(z)
        p /= p.sum(axis=1, keepdims=True)
        d = -p
        d[np.arange(n), joint_action] += 1.0
        grad_int = d[i].copy()
        # cross terms: -d[n] * e[i]/excl[n] for every owner n != i; the ratio
        # is formed per owner so each term stays bounded by |d[n]|
        cross = d * (e[i] / excl)
        cross[i] = 0.0
        grad_int -= cross.sum(axis=0)
    out = np.empty((k, 2))
    out[:, 0] = grad_int
    out[:, 1] = feats[i] * grad_int
    return out
