"""Training loop: gradient estimation, ascent step, consensus exchange.

Each iteration runs the shared-horizon episodic estimator under every agent's
belief view, applies theta_i += alpha_t * grad_i, and then exchanges beliefs
over the communication graph. Replications are independent by construction:
every stream label includes the replication index.
"""

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .consensus import BeliefTable, CommSchedule, belief_error, consensus_step
from .estimation import check_estimator, estimate_gradient
from .newsvendor import NewsvendorConfig, NewsvendorEnv
from .policy import check_kind, init_params
from .rng import RngStream

EMA_RATE = 0.05


@dataclass(frozen=True)
class StepSchedule:
    """Diminishing step size alpha_t = alpha0 / t^beta, t starting at 1."""

    alpha0: float = 1.0
    beta: float = 0.5

    def __post_init__(self):
        if self.alpha0 <= 0:
            raise ValueError("alpha0 must be > 0")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")

    def alpha(self, t: int) -> float:
        return self.alpha0 / t ** self.beta


@dataclass(frozen=True)
class TrainConfig:
    env: NewsvendorConfig = field(default_factory=NewsvendorConfig)
    policy_kind: str = "networked"
    estimator: str = "advantage"
    comm: CommSchedule = None
    step: StepSchedule = field(default_factory=StepSchedule)
    iterations: int = 2000
    replications: int = 100
    seed: int = 0
    init_beliefs: str = "zero"
    init_std: float = 0.3

    def __post_init__(self):
        check_kind(self.policy_kind)
        check_estimator(self.estimator)
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.comm is None:
            object.__setattr__(
                self, "comm", CommSchedule(n_agents=self.env.n_agents)
            )
        if self.comm.n_agents != self.env.n_agents:
            raise ValueError("comm schedule and environment disagree on agent count")


METRIC_COLUMNS = (
    "t", "alpha", "t1", "t2", "t2p", "rhat_mean", "grad_norm_mean",
    "grad_norm_concat", "grad_sumsq", "belief_error", "reward_ema",
)


class MetricLog:
    """One row per training iteration; per-agent columns appended at the end."""

    def __init__(self, n_agents: int):
        self.n_agents = n_agents
        self.rows = []

    def append(self, t, alpha, horizons, rhat, grad_norms, grad_concat,
               belief_err, ema):
        t1, t2, t2p = horizons
        row = [
            float(t), float(alpha), float(t1), float(t2), float(t2p),
            float(np.mean(rhat)), float(np.mean(grad_norms)),
            float(grad_concat), float(np.sum(grad_norms ** 2)),
            float(belief_err), float(ema),
        ]
        row.extend(float(x) for x in rhat)
        row.extend(float(x) for x in grad_norms)
        self.rows.append(row)

    @property
    def columns(self):
        cols = list(METRIC_COLUMNS)
        cols += [f"rhat_{i}" for i in range(self.n_agents)]
        cols += [f"grad_norm_{i}" for i in range(self.n_agents)]
        return cols

    def column(self, name) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows])

    def as_array(self) -> np.ndarray:
        return np.array(self.rows)


@dataclass
class TrainResult:
    params: np.ndarray
    beliefs: BeliefTable
    log: MetricLog


def train(config: TrainConfig, replication: int = 0, env=None) -> TrainResult:
    """Run one replication of networked policy gradient play.

    Deterministic given (config.seed, replication). ``env`` defaults to a
    newsvendor instance built from the config; tests may pass any GameEnv.
    """
    if env is None:
        env = NewsvendorEnv(config.env)
    n = env.num_agents
    seed = config.seed
    hstream = RngStream(seed, f"rep{replication}/horizon")
    astreams = [RngStream(seed, f"rep{replication}/action/{i}") for i in range(n)]
    istream = RngStream(seed, f"rep{replication}/init")

    params = init_params(n, env.num_actions, istream, config.init_std)
    beliefs = BeliefTable.from_params(params, config.init_beliefs)
    log = MetricLog(n)
    ema = None

    for t in range(1, config.iterations + 1):
        est = estimate_gradient(env, beliefs.copies, config.policy_kind,
                                config.estimator, hstream, astreams)
        alpha = config.step.alpha(t)
        params += alpha * est.per_agent
        consensus_step(beliefs, params, config.comm, t)

        grad_norms = np.sqrt((est.per_agent ** 2).sum(axis=(1, 2)))
        grad_concat = float(np.sqrt((est.per_agent ** 2).sum()))
        rhat_mean = float(np.mean(est.rhat))
        ema = rhat_mean if ema is None else EMA_RATE * rhat_mean + (1 - EMA_RATE) * ema
        log.append(t, alpha, est.horizons, est.rhat, grad_norms, grad_concat,
                   belief_error(beliefs, params), ema)
    return TrainResult(params, beliefs, log)


AGGREGATE_METRICS = ("reward_ema", "rhat_mean", "grad_norm_mean",
                     "grad_norm_concat", "belief_error")


@dataclass
class Aggregate:
    """Per-iteration mean and 95% confidence half-width across replications."""

    iterations: np.ndarray
    mean: dict
    ci95: dict
    n_replications: int

    @property
    def columns(self):
        cols = ["t"]
        for m in AGGREGATE_METRICS:
            cols += [f"{m}_mean", f"{m}_ci95"]
        return cols

    def as_array(self) -> np.ndarray:
        cols = [self.iterations]
        for m in AGGREGATE_METRICS:
            cols += [self.mean[m], self.ci95[m]]
        return np.stack(cols, axis=1)


def run_replications(config: TrainConfig, replication_indices=None,
                     env_factory=None) -> tuple:
    """Run all replications and aggregate the metric trajectories.

    Returns (aggregate, logs). ``replication_indices`` overrides the default
    range(config.replications); passing repeated indices forces identical
    replications (used to test zero-width confidence intervals).
    """
    if replication_indices is None:
        replication_indices = list(range(config.replications))
    if len(replication_indices) < 2:
        raise ValueError("need at least 2 replications to aggregate")
    logs = []
    for r in replication_indices:
        env = env_factory() if env_factory is not None else None
        logs.append(train(config, replication=r, env=env).log)
    return aggregate_logs(logs), logs


def aggregate_logs(logs) -> Aggregate:
    stacks = {m: np.stack([log.column(m) for log in logs]) for m in AGGREGATE_METRICS}
    n = len(logs)
    mean = {m: s.mean(axis=0) for m, s in stacks.items()}
    ci95 = {
        m: 1.96 * s.std(axis=0, ddof=1) / math.sqrt(n) for m, s in stacks.items()
    }
    return Aggregate(logs[0].column("t"), mean, ci95, n)


def stationarity_diagnostic(log: MetricLog, window: int) -> np.ndarray:
    """Running minimum of the windowed mean of sum_i ||grad_i||^2.

    Element t is the best (smallest) windowed mean seen up to iteration t;
    the final element is the scalar diagnostic.
    """
    sumsq = log.column("grad_sumsq")
    if window > len(sumsq):
        raise ValueError("window exceeds the number of logged iterations")
    kernel = np.ones(window) / window
    windowed = np.convolve(sumsq, kernel, mode="valid")
    return np.minimum.accumulate(windowed)


# --- CSV emission ---------------------------------------------------------

def _fmt(x: float) -> str:
    return format(x, ".17g")


def provenance_lines(config_text: str, seed: int, extra: dict = None) -> list:
    digest = hashlib.sha256(config_text.encode("utf-8")).hexdigest()
    lines = [
        f"# config_hash={digest}",
        f"# master_seed={seed}",
        f"# code_version={__version__}",
    ]
    for k, v in (extra or {}).items():
        lines.append(f"# {k}={v}")
    return lines


def write_log_csv(log: MetricLog, path, provenance=()):
    with open(path, "w") as fh:
        for line in provenance:
            fh.write(line + "\n")
        fh.write(",".join(log.columns) + "\n")
        for row in log.rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_aggregate_csv(agg: Aggregate, path, provenance=()):
    arr = agg.as_array()
    with open(path, "w") as fh:
        for line in provenance:
            fh.write(line + "\n")
        fh.write(f"# replications={agg.n_replications}\n")
        fh.write(",".join(agg.columns) + "\n")
        for row in arr:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
