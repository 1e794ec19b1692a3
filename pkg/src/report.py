"""
DSRE comparison grids and latent-order scatter plots.

compare() puts the identity-ordering DSRE next to the UNN 1 and UNN 2
results for several neighborhood sizes; plot_embedding() renders a
dataset as SVG with each point colored by its latent slot.
"""

import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.colors import LinearSegmentedColormap
from matplotlib.figure import Figure

from .embed import Criterion, EmbedConfig, InsertionOrder, Strategy, embed
from .errors import InvalidArgumentError
from .knn_core import LatentOrdering, dsre

log = logging.getLogger(__name__)

REPORT_COLUMNS = ["dataset", "K", "init", "unn1", "unn2"]
COLORMAP = "viridis"
MARGIN = 0.05
SVG_RC = {"svg.hashsalt": "unn-latent-order", "svg.fonttype": "none"}


@dataclass(frozen=True)
class ReportRow:
    dataset: str
    K: int
    init: float
    unn1: float
    unn2: float


@dataclass(frozen=True)
class DsreReport:
    rows: tuple
    metadata: dict = field(default_factory=dict)

    def to_frame(self):
        return pd.DataFrame([[r.dataset, r.K, r.init, r.unn1, r.unn2] for r in self.rows],
                            columns=REPORT_COLUMNS)

    def to_csv(self):
        """Serialized grid; floats use the shortest round-trip repr."""
        return self.to_frame().to_csv(index=False, lineterminator="\n")


# ────────────────────────────────────────────────────────────────
# COMPARISON GRID
# ────────────────────────────────────────────────────────────────

def compare(data, ks, seed=None, label="data"):
    """
    Initial (identity) DSRE against UNN 1 and UNN 2 for each K.

    Both strategies run with the pointwise criterion in dataset order on
    the same Dataset instance.  ``seed`` is the seed that produced the
    data, echoed in the metadata.
    """
    ks = [int(k) for k in ks]
    if not ks:
        raise InvalidArgumentError("compare needs at least one K")
    if any(k < 1 for k in ks):
        raise InvalidArgumentError(f"every K must be >= 1, got {ks}")
    if data.N < 2:
        raise InvalidArgumentError(f"compare needs N >= 2, got N = {data.N}")

    identity = LatentOrdering.identity(data.N)
    rows = []
    for k in ks:
        init = dsre(identity, data, k)
        finals = {}
        for strategy in Strategy:
            result = embed(data, EmbedConfig(K=k, strategy=strategy))
            finals[strategy] = result.final_dsre
        rows.append(ReportRow(dataset=label, K=k, init=init,
                              unn1=finals[Strategy.UNN1], unn2=finals[Strategy.UNN2]))
        log.info("%s K=%d: init %.4g  unn1 %.4g  unn2 %.4g",
                 label, k, init, finals[Strategy.UNN1], finals[Strategy.UNN2])

    metadata = {
        "datasets": {label: {"seed": seed, "N": data.N, "d": data.d}},
        "ks": ks,
        "criterion": Criterion.POINTWISE.value,
        "insertion_order": InsertionOrder.DATASET.value,
        "init_ordering": "identity",
    }
    return DsreReport(rows=tuple(rows), metadata=metadata)


def compare_many(labelled, ks):
    """
    Grid over several datasets.

    ``labelled`` is a sequence of (label, Dataset, seed) triples; the rows
    keep that order.
    """
    rows, datasets = [], {}
    metadata = None
    for label, data, seed in labelled:
        part = compare(data, ks, seed=seed, label=label)
        rows.extend(part.rows)
        datasets.update(part.metadata["datasets"])
        metadata = part.metadata
    if metadata is None:
        raise InvalidArgumentError("compare_many needs at least one dataset")
    return DsreReport(rows=tuple(rows), metadata={**metadata, "datasets": datasets})


def write_report(report, path):
    """Write the CSV grid and its ``.meta.json`` sidecar; returns both paths."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_csv())
    meta_path = path.with_name(path.name + ".meta.json")
    meta = {**report.metadata, "colormap": COLORMAP}
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path, meta_path


# ────────────────────────────────────────────────────────────────
# PLOTS
# ────────────────────────────────────────────────────────────────

def ramp_positions(ordering):
    """Position on the color ramp of every pattern: slot / (M-1), by pattern index."""
    m = ordering.M
    pos = np.zeros(m)
    if m > 1:
        pos[np.asarray(ordering.sequence)] = np.arange(m) / (m - 1)
    return pos


def latent_colors(ordering, cmap=COLORMAP):
    """RGBA color of every pattern (row = pattern index): slot 0 → ramp start, slot M-1 → ramp end."""
    ramp = matplotlib.colormaps[cmap]
    if ordering.M > ramp.N:
        # one lookup entry per slot
        ramp = LinearSegmentedColormap.from_list(ramp.name, ramp(np.linspace(0, 1, ramp.N)), N=ordering.M)
    return ramp(ramp_positions(ordering))


def _limits(values):
    lo, hi = float(np.min(values)), float(np.max(values))
    span = hi - lo
    pad = MARGIN * span if span > 0 else 0.5
    return lo - pad, hi + pad


def plot_embedding(data, ordering=None, dims=(0, 1), title=None):
    """
    SVG scatter plot of ``data`` colored by latent slot.

    Parameters
    ----------
    data : Dataset with d >= 2
    ordering : complete LatentOrdering; None plots the identity (unsorted) order
    dims : two axis indices, or three for an orthographic 3-D view
    title : optional figure title

    Returns
    -------
    str — standalone SVG document; the points are the children of the
    group with id "patterns".
    """
    if data.d < 2:
        raise InvalidArgumentError(f"plots need d >= 2, got d = {data.d}")
    dims = tuple(int(a) for a in dims)
    if len(dims) not in (2, 3):
        raise InvalidArgumentError(f"dims must name 2 or 3 axes, got {dims}")
    for a in dims:
        if not 0 <= a < data.d:
            raise InvalidArgumentError(f"axis {a} outside 0..{data.d - 1}")
    if len(set(dims)) != len(dims):
        raise InvalidArgumentError(f"axes must be distinct, got {dims}")
    if ordering is None:
        ordering = LatentOrdering.identity(data.N)
    if not ordering.is_complete(data.N):
        raise InvalidArgumentError(
            f"ordering embeds {ordering.M} patterns, dataset has N = {data.N}")

    colors = latent_colors(ordering)
    coords = [data.patterns[:, a] for a in dims]

    fig = Figure(figsize=(5.0, 5.0))
    if len(dims) == 3:
        ax = fig.add_subplot(projection="3d", proj_type="ortho")
        sc = ax.scatter(*coords, c=colors, s=12, linewidths=0, depthshade=False)
        ax.set_xlim(*_limits(coords[0]))
        ax.set_ylim(*_limits(coords[1]))
        ax.set_zlim(*_limits(coords[2]))
        ax.set_zlabel(f"y{dims[2]}")
    else:
        ax = fig.add_subplot()
        sc = ax.scatter(*coords, c=colors, s=12, linewidths=0)
        ax.set_xlim(*_limits(coords[0]))
        ax.set_ylim(*_limits(coords[1]))
    sc.set_gid("patterns")
    ax.set_xlabel(f"y{dims[0]}")
    ax.set_ylabel(f"y{dims[1]}")
    if title:
        ax.set_title(title, fontsize=9)

    buf = io.StringIO()
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(buf, format="svg", metadata={
            "Date": None,
            "Description": f"color ramp {COLORMAP}: latent slot 0 = start, slot {data.N - 1} = end",
        })
    return buf.getvalue()
