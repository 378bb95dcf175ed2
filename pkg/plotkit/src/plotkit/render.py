"""Figure rendering: mean curves with shaded 95% confidence bands."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

RENDER_KINDS = ("reward_ema", "grad_norm", "belief_error")

# which metric column each render kind displays and how
_KIND_METRIC = {
    "reward_ema": ("reward_ema", "linear", "reward (EMA)"),
    "grad_norm": ("grad_norm_mean", "log", "mean gradient norm"),
    "belief_error": ("belief_error", "log", "belief error"),
}

# figure name -> render kind used by the command line
FIGURE_METRICS = {
    "fig2": "reward_ema",
    "fig3": "belief_error",
    "fig4": "belief_error",
}

_FIGSIZE = (7.0, 4.5)
_LOG_FLOOR = 1e-12


def render_figure(bundles, kind, out_path) -> None:
    """Render one panel with a labeled curve per bundle.

    Gradient-norm and belief-error panels use a log-scale y axis. Output is
    deterministic for fixed inputs: fixed canvas size and no timestamps.
    """
    if kind not in _KIND_METRIC:
        raise ValueError(f"unknown render kind {kind!r}, expected one of {RENDER_KINDS}")
    if not bundles:
        raise ValueError("need at least one series bundle")
    metric, scale, ylabel = _KIND_METRIC[kind]

    fig, ax = plt.subplots(figsize=_FIGSIZE)
    try:
        for bundle in bundles:
            t = bundle.iterations
            mean = bundle.mean[metric]
            ci = bundle.ci95[metric]
            if scale == "log":
                mean = np.maximum(mean, _LOG_FLOOR)
                lo = np.maximum(mean - ci, _LOG_FLOOR)
            else:
                lo = mean - ci
            ax.plot(t, mean, label=bundle.label, linewidth=1.2)
            ax.fill_between(t, lo, mean + ci, alpha=0.2, linewidth=0)
        if scale == "log":
            ax.set_yscale("log")
        ax.set_xlabel("iteration")
        ax.set_ylabel(ylabel)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(out_path, dpi=120, metadata=_stable_metadata(out_path))
    finally:
        plt.close(fig)


def _stable_metadata(out_path):
    """Strip writer timestamps so identical inputs yield identical bytes."""
    name = str(out_path).lower()
    if name.endswith(".png"):
        return {"Software": "plotkit"}
    if name.endswith(".svg"):
        return {"Date": None}
    if name.endswith(".pdf"):
        return {"CreationDate": None}
    return None
