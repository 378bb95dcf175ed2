"""Time-varying communication graphs and belief tracking.

Each agent keeps a local copy of every other agent's parameters and refines
it by mixing neighbors' copies with a row-stochastic weight matrix. The
tracked agent acts as a source: its own row is the unit row, so its true
parameters flow outward through the graph.
"""

from dataclasses import dataclass

import numpy as np

TOPOLOGIES = ("complete", "star", "ring", "tv_star", "tv_ring", "perfect")
BELIEF_INITS = ("zero", "exact")


@dataclass(frozen=True)
class CommSchedule:
    """Deterministic time-indexed edge sets plus the mixing-weight rule.

    ``period`` is the window length over which the edge union must contain a
    connected spanning graph; construction fails if it does not.
    """

    n_agents: int
    topology: str = "tv_star"
    period: int = 5
    hub: int = 0

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}, expected one of {TOPOLOGIES}")
        if self.n_agents < 2:
            raise ValueError("n_agents must be >= 2")
        if self.period < 1:
            raise ValueError("period must be >= 1")
        if not 0 <= self.hub < self.n_agents:
            raise ValueError(f"hub {self.hub} out of range")
        if self.topology != "perfect":
            ok, detail = check_window_connectivity(self)
            if not ok:
                raise ValueError(
                    f"edge union over windows of length {self.period} is not "
                    f"a connected spanning graph ({detail})"
                )


def edges_at(schedule: CommSchedule, t: int) -> frozenset:
    """Undirected edge set E_t as a frozenset of sorted (i, j) pairs."""
    if t < 0:
        raise ValueError("t must be >= 0")
    n, hub = schedule.n_agents, schedule.hub
    topo = schedule.topology
    if topo in ("complete", "perfect"):
        return frozenset((i, j) for i in range(n) for j in range(i + 1, n))
    if topo == "star":
        return frozenset(tuple(sorted((hub, j))) for j in range(n) if j != hub)
    if topo == "ring":
        return frozenset(tuple(sorted((i, (i + 1) % n))) for i in range(n))
    if topo == "tv_star":
        spokes = [j for j in range(n) if j != hub]
        j = spokes[t % (n - 1)]
        return frozenset({tuple(sorted((hub, j)))})
    # tv_ring: one ring edge per iteration, cycling lexicographically
    ring = sorted(tuple(sorted((i, (i + 1) % n))) for i in range(n))
    return frozenset({ring[t % n]})


def check_window_connectivity(schedule: CommSchedule, starts: int = None):
    """Assumption check: the edge union over every window of length ``period``
    spans and connects all agents. Windows starting at t = 0 .. 2N cover every
    phase of the cyclic schedules.
    """
    n = schedule.n_agents
    if starts is None:
        starts = 2 * n + 1
    for t0 in range(starts):
        union = set()
        for t in range(t0, t0 + schedule.period):
            union |= edges_at(schedule, t)
        if not _is_connected(n, union):
            return False, f"window starting at t={t0}"
    return True, ""


def _is_connected(n: int, edges) -> bool:
    adj = {i: set() for i in range(n)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def mixing_matrix(schedule: CommSchedule, t: int) -> np.ndarray:
    """Uniform-weight mixing matrix A_t: row i puts 1/(|N_i|+1) on itself and
    each current neighbor. Every nonzero entry is at least 1/N.
    """
    n = schedule.n_agents
    a = np.zeros((n, n))
    neighbors = {i: [] for i in range(n)}
    for i, j in edges_at(schedule, t):
        neighbors[i].append(j)
        neighbors[j].append(i)
    for i in range(n):
        w = 1.0 / (len(neighbors[i]) + 1)
        a[i, i] = w
        for j in neighbors[i]:
            a[i, j] = w
    return a


def build_weights(schedule: CommSchedule, t: int, source: int) -> np.ndarray:
    """Row-stochastic weight matrix W_{source, t}: the source row is the unit
    row; every other row mixes uniformly over itself and current neighbors.
    """
    w = mixing_matrix(schedule, t)
    w[source, :] = 0.0
    w[source, source] = 1.0
    return w


class BeliefTable:
    """copies[i, j] is agent i's local copy of agent j's K x 2 parameters.

    The diagonal copies[i, i] always equals agent i's true parameters.
    """

    def __init__(self, copies: np.ndarray):
        self.copies = copies

    @classmethod
    def from_params(cls, params: np.ndarray, init: str = "zero"):
        if init not in BELIEF_INITS:
            raise ValueError(f"unknown belief init {init!r}, expected one of {BELIEF_INITS}")
        n = params.shape[0]
        if init == "exact":
            copies = np.broadcast_to(params, (n,) + params.shape).copy()
        else:
            copies = np.zeros((n,) + params.shape)
            for i in range(n):
                copies[i, i] = params[i]
        return cls(copies)

    @property
    def n_agents(self):
        return self.copies.shape[0]


def consensus_step(beliefs: BeliefTable, params: np.ndarray,
                   schedule: CommSchedule, t: int) -> None:
    """One belief exchange, in place.

    For each tracked agent j, its own copy is first refreshed with the fresh
    parameters, then every agent mixes with W_{j, t}. Under the 'perfect'
    pseudo-topology all copies are overwritten with the true parameters.
    """
    copies = beliefs.copies
    n = beliefs.n_agents
    if schedule.topology == "perfect":
        copies[:] = params[None, :]
        return
    base = mixing_matrix(schedule, t)
    new = np.empty_like(copies)
    for j in range(n):
        col = copies[:, j].copy()
        col[j] = params[j]
        w = base.copy()
        w[j, :] = 0.0
        w[j, j] = 1.0
        new[:, j] = np.tensordot(w, col, axes=(1, 0))
    copies[:] = new


def belief_error(beliefs: BeliefTable, params: np.ndarray) -> float:
    """Mean Euclidean error over ordered pairs:
    (1 / (N (N-1))) sum_i sum_{j != i} ||theta_i - copies[j, i]||.
    """
    n = beliefs.n_agents
    diff = params[None, :] - beliefs.copies  # [j, i] = theta_i - copy^j_i
    norms = np.sqrt((diff ** 2).sum(axis=(2, 3)))  # (N, N), [j, i]
    total = norms.sum() - np.trace(norms)
    return float(total / (n * (n - 1)))
