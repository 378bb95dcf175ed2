"""Episodic stochastic gradient estimation.

One estimate uses two consecutive episodes: a first rollout of random length
T1 ~ Geom(1 - gamma) locates a state-action sample, and a second rollout of
length T2 ~ Geom(1 - sqrt(gamma)) collects sqrt(gamma)-discounted rewards from
it. The advantage and TD variants spend one extra horizon draw on an
independent value rollout so that all agents stay synchronized on the shared
horizon stream.
"""

import math
from dataclasses import dataclass

import numpy as np

from .policy import joint_policy_probs, score_sum, _inverse_cdf
from .rng import draw_geometric

ESTIMATOR_Q = "q"
ESTIMATOR_ADVANTAGE = "advantage"
ESTIMATOR_TD = "td"
ESTIMATOR_KINDS = (ESTIMATOR_Q, ESTIMATOR_ADVANTAGE, ESTIMATOR_TD)


def check_estimator(kind: str) -> str:
    if kind not in ESTIMATOR_KINDS:
        raise ValueError(f"unknown estimator {kind!r}, expected one of {ESTIMATOR_KINDS}")
    return kind


@dataclass
class GradientEstimate:
    """Per-agent stochastic gradients plus the quantities that produced them."""

    per_agent: np.ndarray  # (N, K, 2)
    rhat: np.ndarray       # (N,)
    horizons: tuple        # (T1, T2, T2') with T2' = -1 when unused


def _sample_joint(state, belief_views, kind, action_streams, cache=None):
    # belief views are fixed for the duration of one gradient estimate, so the
    # joint probabilities depend only on the state features; memoizing on them
    # removes the dominant cost when states repeat (e.g. single-state games)
    if cache is None:
        probs = joint_policy_probs(state, belief_views, kind)
    else:
        key = state.features.tobytes()
        probs = cache.get(key)
        if probs is None:
            probs = joint_policy_probs(state, belief_views, kind)
            cache[key] = probs
    n = probs.shape[0]
    actions = np.empty(n, dtype=np.int64)
    for i in range(n):
        actions[i] = _inverse_cdf(probs[i], action_streams[i].rng.random())
    return actions


def rollout_phase1(env, belief_views, kind, t1, action_streams, cache=None):
    """Reset the environment, play t1 steps, and return (s_t1, a_t1).

    Every agent samples from its own belief view. For t1 = 0 the pair is the
    reset state together with the joint action sampled at it.
    """
    if t1 < 0:
        raise ValueError("t1 must be >= 0")
    state = env.reset()
    action = _sample_joint(state, belief_views, kind, action_streams, cache)
    for _ in range(t1):
        state, _ = env.step(action)
        action = _sample_joint(state, belief_views, kind, action_streams, cache)
    return env.get_state(), action


def estimate_Q(env, belief_views, kind, state, t2, action_streams,
               first_action=None, cache=None):
    """sqrt(gamma)-weighted reward sum over t2 + 1 steps starting at ``state``.

    The tau = 0 reward at (state, first_action) is always included; for t2 = 0
    the estimate is that single reward. When ``first_action`` is None a fresh
    joint action is sampled, which turns the estimate into the value estimate
    V-hat of ``state``.
    """
    env.set_state(state)
    cur = env.get_state()
    if first_action is None:
        action = _sample_joint(cur, belief_views, kind, action_streams, cache)
    else:
        action = first_action
    sqrt_gamma = math.sqrt(env.discount)
    weight = 1.0
    cur, rewards = env.step(action)
    total = rewards.astype(float)
    for _ in range(t2):
        action = _sample_joint(cur, belief_views, kind, action_streams, cache)
        weight *= sqrt_gamma
        cur, rewards = env.step(action)
        total += weight * rewards
    return total


def estimate_V(env, belief_views, kind, state, t2, action_streams, cache=None):
    """Value estimate at ``state``: estimate_Q with a freshly sampled action."""
    return estimate_Q(env, belief_views, kind, state, t2, action_streams,
                      first_action=None, cache=cache)


def estimate_gradient(env, belief_views, kind, estimator, horizon_stream,
                      action_streams) -> GradientEstimate:
    """One pass of the episodic gradient estimator (all agents at once).

    All agents share the trajectory and the horizon draws; agent i's gradient
    is R_i / (1 - gamma) times the sum over owners n of grad_i log pi_n at the
    sampled pair, everything evaluated under agent i's belief view.
    """
    check_estimator(estimator)
    gamma = env.discount
    n = env.num_agents
    t1 = draw_geometric(horizon_stream, 1.0 - gamma)
    t2 = draw_geometric(horizon_stream, 1.0 - math.sqrt(gamma))
    t2p = -1
    if estimator in (ESTIMATOR_ADVANTAGE, ESTIMATOR_TD):
        t2p = draw_geometric(horizon_stream, 1.0 - math.sqrt(gamma))

    cache = {}
    state, action = rollout_phase1(env, belief_views, kind, t1, action_streams,
                                   cache)

    if estimator == ESTIMATOR_Q:
        rhat = estimate_Q(env, belief_views, kind, state, t2, action_streams,
                          first_action=action, cache=cache)
    elif estimator == ESTIMATOR_ADVANTAGE:
        qhat = estimate_Q(env, belief_views, kind, state, t2, action_streams,
                          first_action=action, cache=cache)
        vhat = estimate_V(env, belief_views, kind, state, t2p, action_streams, cache)
        rhat = qhat - vhat
    else:  # temporal difference
        env.set_state(state)
        next_state, r0 = env.step(action)
        next_state = env.get_state()
        v_next = estimate_V(env, belief_views, kind, next_state, t2,
                            action_streams, cache)
        v_here = estimate_V(env, belief_views, kind, state, t2p, action_streams,
                            cache)
        rhat = r0 + gamma * v_next - v_here

    scale = 1.0 / (1.0 - gamma)
    grads = np.empty((n,) + belief_views.shape[2:])
    for i in range(n):
        grads[i] = (scale * rhat[i]) * score_sum(i, state, action,
                                                 belief_views[i], kind)
    return GradientEstimate(grads, rhat, (t1, t2, t2p))
