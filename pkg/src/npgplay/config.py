"""Flat key=value experiment files.

The format is line-oriented: one ``section.key=value`` per line, ``#`` starts
a comment, blank lines are ignored. Unknown keys are rejected so that a typo
cannot silently fall back to a default.
"""

from .consensus import BELIEF_INITS, CommSchedule, TOPOLOGIES
from .estimation import ESTIMATOR_KINDS
from .newsvendor import NewsvendorConfig
from .policy import POLICY_KINDS
from .trainer import StepSchedule, TrainConfig

_SCHEMA = {
    "env.n_agents": int,
    "env.demand": float,
    "env.cost_opportunity": float,
    "env.cost_storage": float,
    "env.discount": float,
    "env.initial_inventory": float,
    "policy.kind": str,
    "policy.init_std": float,
    "comm.topology": str,
    "comm.period": int,
    "comm.hub": int,
    "comm.init_beliefs": str,
    "train.estimator": str,
    "train.iterations": int,
    "train.replications": int,
    "train.alpha0": float,
    "train.beta": float,
    "train.seed": int,
    "train.out_dir": str,
}

DEFAULTS = {
    "env.n_agents": 5,
    "env.demand": 1.0,
    "env.cost_opportunity": 0.3,
    "env.cost_storage": 0.1,
    "env.discount": 0.95,
    "env.initial_inventory": 1.0,
    "policy.kind": "networked",
    "policy.init_std": 0.3,
    "comm.topology": "tv_star",
    "comm.period": 5,
    "comm.hub": 0,
    "comm.init_beliefs": "zero",
    "train.estimator": "advantage",
    "train.iterations": 2000,
    "train.replications": 100,
    "train.alpha0": 1.0,
    "train.beta": 0.5,
    "train.seed": 0,
    "train.out_dir": "",
}

_CHOICES = {
    "policy.kind": POLICY_KINDS,
    "comm.topology": TOPOLOGIES,
    "comm.init_beliefs": BELIEF_INITS,
    "train.estimator": ESTIMATOR_KINDS,
}


class ConfigError(ValueError):
    pass


def parse_kv_lines(lines, base=None) -> dict:
    values = dict(DEFAULTS if base is None else base)
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        values[key] = _coerce(key, value)
    return values


def _coerce(key, value):
    if key not in _SCHEMA:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        typed = _SCHEMA[key](value)
    except ValueError:
        raise ConfigError(f"cannot parse {key}={value!r} as {_SCHEMA[key].__name__}")
    if key in _CHOICES and typed not in _CHOICES[key]:
        raise ConfigError(f"{key} must be one of {_CHOICES[key]}, got {typed!r}")
    return typed


def load_spec(path) -> dict:
    with open(path) as fh:
        return parse_kv_lines(fh)


def apply_overrides(values: dict, overrides) -> dict:
    out = dict(values)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, _, value = item.partition("=")
        out[key.strip()] = _coerce(key.strip(), value.strip())
    return out


def canonical_text(values: dict) -> str:
    """Stable textual form used for the provenance hash."""
    return "\n".join(f"{k}={values[k]}" for k in sorted(values)) + "\n"


def to_train_config(values: dict) -> TrainConfig:
    env = NewsvendorConfig(
        n_agents=values["env.n_agents"],
        demand=values["env.demand"],
        cost_opportunity=values["env.cost_opportunity"],
        cost_storage=values["env.cost_storage"],
        discount=values["env.discount"],
        initial_inventory=values["env.initial_inventory"],
    )
    comm = CommSchedule(
        n_agents=values["env.n_agents"],
        topology=values["comm.topology"],
        period=values["comm.period"],
        hub=values["comm.hub"],
    )
    step = StepSchedule(alpha0=values["train.alpha0"], beta=values["train.beta"])
    return TrainConfig(
        env=env,
        policy_kind=values["policy.kind"],
        estimator=values["train.estimator"],
        comm=comm,
        step=step,
        iterations=values["train.iterations"],
        replications=values["train.replications"],
        seed=values["train.seed"],
        init_beliefs=values["comm.init_beliefs"],
        init_std=values["policy.init_std"],
    )
