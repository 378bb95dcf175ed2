"""Command-line front end: run experiments, reproduce figure grids, validate
configuration assumptions. Verbs:

  npg run --spec PATH [--set key=value ...] [--out DIR]
  npg reproduce {fig2,fig3,fig4} [--scale X] [--out DIR]
  npg validate --spec PATH

The default output directory can be set with the NPG_OUT_DIR environment
variable.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from . import config as cfg
from .consensus import CommSchedule, build_weights
from .trainer import (
    provenance_lines,
    run_replications,
    stationarity_diagnostic,
    write_aggregate_csv,
    write_log_csv,
)

# Step-size magnitudes picked by a 3-point grid {10, 1, 0.1} on the default
# newsvendor setup: largest magnitude whose 2000-iteration runs keep both the
# reward EMA and the belief-tracking error stable (q diverges above 0.1).
DEFAULT_ALPHA0 = {"q": 0.1, "advantage": 1.0, "td": 1.0}


def _default_out(explicit):
    if explicit:
        return Path(explicit)
    return Path(os.environ.get("NPG_OUT_DIR", "npg_out"))


def cmd_run(args) -> int:
    spec_path = Path(args.spec)
    if not spec_path.is_file():
        print(f"error: spec file not found: {spec_path}", file=sys.stderr)
        return 2
    try:
        values = cfg.apply_overrides(cfg.load_spec(spec_path), args.set or [])
        train_config = cfg.to_train_config(values)
    except (cfg.ConfigError, ValueError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1
    out = _default_out(args.out or values.get("train.out_dir"))
    out.mkdir(parents=True, exist_ok=True)
    prov = provenance_lines(cfg.canonical_text(values), values["train.seed"],
                            {"estimator": values["train.estimator"],
                             "policy_kind": values["policy.kind"],
                             "topology": values["comm.topology"]})
    agg, logs = run_replications(train_config)
    for r, log in enumerate(logs):
        write_log_csv(log, out / f"rep{r:03d}.csv", prov + [f"# replication={r}"])
    write_aggregate_csv(agg, out / "aggregate.csv", prov)
    diag = stationarity_diagnostic(logs[0], min(50, train_config.iterations))
    print(f"wrote {len(logs) + 1} CSV files to {out}")
    print(f"final reward EMA (mean):   {agg.mean['reward_ema'][-1]:.6f}")
    print(f"final belief error (mean): {agg.mean['belief_error'][-1]:.6e}")
    print(f"stationarity diagnostic:   {diag[-1]:.6e}")
    return 0


def _fig_conditions(figure: str):
    if figure == "fig2":
        return [
            {"policy.kind": kind, "train.estimator": est, "comm.topology": "tv_star"}
            for kind in ("networked", "independent")
            for est in ("q", "advantage", "td")
        ]
    if figure == "fig3":
        return [
            {"policy.kind": "networked", "train.estimator": est,
             "comm.topology": "tv_star"}
            for est in ("q", "advantage", "td")
        ]
    if figure == "fig4":
        return [
            {"policy.kind": "networked", "train.estimator": "advantage",
             "comm.topology": topo}
            for topo in ("perfect", "star", "ring", "tv_star", "tv_ring")
        ]
    raise cfg.ConfigError(f"unknown figure {figure!r}, expected fig2, fig3 or fig4")


def _condition_label(cond):
    parts = []
    if "policy.kind" in cond:
        parts.append(cond["policy.kind"])
    parts.append(cond["train.estimator"])
    parts.append(cond["comm.topology"])
    return "_".join(parts)


def cmd_reproduce(args) -> int:
    scale = args.scale
    if not 0.0 < scale <= 1.0:
        print(f"error: scale must be in (0, 1], got {scale}", file=sys.stderr)
        return 1
    try:
        conditions = _fig_conditions(args.figure)
    except cfg.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = _default_out(args.out)
    out.mkdir(parents=True, exist_ok=True)
    replications = max(2, round(100 * scale))
    iterations = max(10, round(2000 * scale))
    manifest = {"figure": args.figure, "scale": scale,
                "replications": replications, "iterations": iterations,
                "conditions": []}
    for cond in conditions:
        values = dict(cfg.DEFAULTS)
        values.update(cond)
        values["train.replications"] = replications
        values["train.iterations"] = iterations
        values["train.alpha0"] = DEFAULT_ALPHA0[values["train.estimator"]]
        values["train.seed"] = args.seed
        train_config = cfg.to_train_config(values)
        label = _condition_label(cond)
        agg, _ = run_replications(train_config)
        prov = provenance_lines(cfg.canonical_text(values), values["train.seed"],
                                {"condition": label})
        path = out / f"{label}_aggregate.csv"
        write_aggregate_csv(agg, path, prov)
        manifest["conditions"].append({"label": label, "file": path.name, **cond})
        print(f"[{args.figure}] {label}: final reward EMA "
              f"{agg.mean['reward_ema'][-1]:.4f}, final belief error "
              f"{agg.mean['belief_error'][-1]:.3e}")
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    print(f"wrote {len(conditions)} condition CSVs + manifest to {out}")
    return 0


def cmd_validate(args) -> int:
    spec_path = Path(args.spec)
    if not spec_path.is_file():
        print(f"error: spec file not found: {spec_path}", file=sys.stderr)
        return 2
    try:
        values = cfg.apply_overrides(cfg.load_spec(spec_path), args.set or [])
    except cfg.ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1
    checks = []
    n = values["env.n_agents"]

    # connectivity of windowed edge unions
    try:
        schedule = CommSchedule(n_agents=n, topology=values["comm.topology"],
                                period=values["comm.period"], hub=values["comm.hub"])
        checks.append(("window-union connectivity", True, "connected spanning union"))
    except ValueError as exc:
        schedule = None
        checks.append(("window-union connectivity", False, str(exc)))

    # weight rule: rows stochastic, nonzero entries bounded below
    if schedule is not None and schedule.topology != "perfect":
        ok, detail = True, f"uniform weights, h = 1/{n}"
        for t in range(2 * n + 1):
            for j in range(n):
                w = build_weights(schedule, t, j)
                if abs(w.sum(axis=1) - 1.0).max() > 1e-12 or w[w > 0].min() < 1.0 / n - 1e-12:
                    ok, detail = False, f"violated at t={t}, source={j}"
                    break
        checks.append(("row-stochastic weights", ok, detail))
    else:
        checks.append(("row-stochastic weights", True, "perfect topology: not applicable"))

    # belief initialization keeps the initial error bounded
    init = values["comm.init_beliefs"]
    checks.append(("bounded initial belief error", init in ("zero", "exact"),
                   f"init_beliefs={init}"))

    # step-size schedule
    beta = values["train.beta"]
    ok = 0.0 < beta <= 1.0
    if ok:
        square_summable = beta > 0.5
        detail = (f"beta={beta}: sum(alpha) diverges; sum(alpha^2) "
                  f"{'converges' if square_summable else 'diverges (beta <= 1/2)'}")
    else:
        detail = f"beta={beta} outside (0, 1]"
    checks.append(("step-size schedule", ok, detail))

    width = max(len(name) for name, _, _ in checks)
    all_ok = True
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        all_ok &= ok
        print(f"{name:<{width}}  {status}  {detail}")
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npg", description="Networked policy gradient play experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a spec file")
    p_run.add_argument("--spec", required=True)
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_run.add_argument("--out")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="reserved; replications run sequentially")
    p_run.set_defaults(func=cmd_run)

    p_rep = sub.add_parser("reproduce", help="run a figure's condition grid")
    p_rep.add_argument("figure", choices=["fig2", "fig3", "fig4"])
    p_rep.add_argument("--scale", type=float, default=1.0)
    p_rep.add_argument("--seed", type=int, default=0)
    p_rep.add_argument("--out")
    p_rep.add_argument("--jobs", type=int, default=1,
                       help="reserved; conditions run sequentially")
    p_rep.set_defaults(func=cmd_reproduce)

    p_val = sub.add_parser("validate", help="check configuration assumptions")
    p_val.add_argument("--spec", required=True)
    p_val.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
