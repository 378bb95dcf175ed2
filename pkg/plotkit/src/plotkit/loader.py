"""Parse aggregate metric CSVs into plottable series bundles.

The expected files are the ``*_aggregate.csv`` (or ``aggregate.csv``) outputs
of the experiment runner: optional ``#``-prefixed provenance lines, a header
row starting with ``t``, and per-metric ``<name>_mean`` / ``<name>_ci95``
column pairs.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

METRICS = ("reward_ema", "rhat_mean", "grad_norm_mean", "grad_norm_concat",
           "belief_error")


class BundleError(ValueError):
    pass


@dataclass
class SeriesBundle:
    """One condition's aggregated trajectories: per-metric mean and CI."""

    label: str
    iterations: np.ndarray
    mean: dict
    ci95: dict

    def __post_init__(self):
        n = len(self.iterations)
        for name, arr in list(self.mean.items()) + list(self.ci95.items()):
            if len(arr) != n:
                raise BundleError(
                    f"bundle {self.label!r}: column {name!r} has {len(arr)} "
                    f"rows, expected {n}"
                )


def parse_aggregate_csv(path, label=None) -> SeriesBundle:
    """Read one aggregate CSV; reject schema mismatches naming the column."""
    lines = [l for l in Path(path).read_text().splitlines()
             if l and not l.startswith("#")]
    if not lines:
        raise BundleError(f"{path}: no header row found")
    cols = lines[0].split(",")
    if cols[0] != "t":
        raise BundleError(f"{path}: first column is {cols[0]!r}, expected 't'")
    data = np.array([[float(x) for x in row.split(",")] for row in lines[1:]])
    if data.ndim != 2 or data.shape[1] != len(cols):
        raise BundleError(f"{path}: ragged rows do not match the header")
    index = {c: k for k, c in enumerate(cols)}
    mean, ci95 = {}, {}
    for m in METRICS:
        for suffix, store in ((f"{m}_mean", mean), (f"{m}_ci95", ci95)):
            if suffix not in index:
                raise BundleError(f"{path}: missing column {suffix!r}")
            store[m] = data[:, index[suffix]]
    if label is None:
        label = Path(path).name.replace("_aggregate.csv", "").replace(".csv", "")
    return SeriesBundle(label, data[:, 0], mean, ci95)


def load_bundle(csv_dir) -> list:
    """Load every aggregate CSV in a directory.

    If a ``manifest.json`` written by the experiment runner is present, its
    condition list determines the files and labels; otherwise all
    ``*aggregate*.csv`` files are loaded with filename-derived labels.
    """
    d = Path(csv_dir)
    if not d.is_dir():
        raise BundleError(f"not a directory: {d}")
    manifest = d / "manifest.json"
    bundles = []
    if manifest.is_file():
        meta = json.loads(manifest.read_text())
        for cond in meta.get("conditions", []):
            path = d / cond["file"]
            if not path.is_file():
                raise BundleError(f"manifest names missing file {path}")
            bundles.append(parse_aggregate_csv(path, cond["label"]))
    else:
        for path in sorted(d.glob("*aggregate*.csv")):
            bundles.append(parse_aggregate_csv(path))
    if not bundles:
        raise BundleError(
            f"{d}: no aggregate CSVs found (expected manifest.json with "
            "condition files, '*_aggregate.csv', or 'aggregate.csv')"
        )
    labels = [b.label for b in bundles]
    if len(set(labels)) != len(labels):
        raise BundleError(f"duplicate condition labels: {labels}")
    return bundles
