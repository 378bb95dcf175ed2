"""Render experiment CSV artifacts into the paper-style figures."""

__version__ = "0.1.0"

from .loader import BundleError, SeriesBundle, load_bundle
from .render import FIGURE_METRICS, RENDER_KINDS, render_figure

__all__ = [
    "BundleError",
    "SeriesBundle",
    "load_bundle",
    "FIGURE_METRICS",
    "RENDER_KINDS",
    "render_figure",
]
