"""Networked policy gradient play for Markov potential games."""

__version__ = "0.1.0"

from .rng import RngStream, draw_geometric
from .env import GameEnv
from .newsvendor import (
    InventoryState,
    NewsvendorConfig,
    NewsvendorEnv,
    nv_exact_value,
    nv_reward,
    nv_transition,
)
from .policy import (
    INDEPENDENT,
    NETWORKED,
    init_params,
    mellow_max,
    policy_probs,
    sample_action,
    score_function,
)
from .estimation import (
    ESTIMATOR_ADVANTAGE,
    ESTIMATOR_Q,
    ESTIMATOR_TD,
    GradientEstimate,
    estimate_gradient,
    estimate_Q,
    estimate_V,
    rollout_phase1,
)
from .consensus import (
    BeliefTable,
    CommSchedule,
    belief_error,
    build_weights,
    consensus_step,
    edges_at,
)
from .trainer import (
    MetricLog,
    StepSchedule,
    TrainConfig,
    run_replications,
    stationarity_diagnostic,
    train,
)
