"""
Synthetic benchmark shapes and CSV datasets.

All coordinates come from one S-shaped curve

    x(t) = sin t,   z(t) = sign(t) · (cos t − 1),   t ∈ [−3π/2, 3π/2]

  S2D       — (x, z) plus isotropic Gaussian noise
  S3D       — (x, h, z) with an independent height h ∈ [0, 2]
  S3D-hole  — S3D without the points whose (t, h) falls in HOLE_T × HOLE_H

Randomness comes from numpy's PCG64 generator (``default_rng``), so a seed
gives the same dataset on every platform.
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import DataParseError, GenerationError, InvalidArgumentError
from .knn_core import Dataset, LatentOrdering

log = logging.getLogger(__name__)

T_RANGE = (-1.5 * np.pi, 1.5 * np.pi)
HEIGHT_RANGE = (0.0, 2.0)
HOLE_T = (-np.pi / 4, np.pi / 4)
HOLE_H = (0.67, 1.33)
DEFAULT_SIGMA = 0.05
# rejection sampling gives up after this many draws per requested point
DRAW_CAP_FACTOR = 1000


class Shape(str, Enum):
    S2D = "s2d"
    S3D = "s3d"
    S3D_HOLE = "s3d-hole"


# benchmark sizes of the three shapes
DEFAULT_N = {Shape.S2D: 200, Shape.S3D: 500, Shape.S3D_HOLE: 400}


@dataclass(frozen=True)
class GenSpec:
    shape: Shape
    n: int
    noise_sigma: float = DEFAULT_SIGMA
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "shape", Shape(self.shape))
        except ValueError as exc:
            raise InvalidArgumentError(str(exc)) from exc
        if int(self.n) != self.n or self.n < 2:
            raise InvalidArgumentError(f"n must be an integer >= 2, got {self.n}")
        if not np.isfinite(self.noise_sigma) or self.noise_sigma < 0:
            raise InvalidArgumentError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def label(self):
        return self.shape.value


@dataclass(frozen=True, eq=False)
class SCurveSample:
    """Generated dataset together with the pre-noise curve parameters."""
    data: Dataset
    t: np.ndarray
    height: np.ndarray


def s_curve(t, height=None):
    """Noise-free S-curve points for parameters t (and heights for the 3-D surface)."""
    t = np.asarray(t, dtype=float)
    x = np.sin(t)
    z = np.sign(t) * (np.cos(t) - 1.0)
    if height is None:
        return np.column_stack((x, z))
    return np.column_stack((x, np.asarray(height, dtype=float), z))


def in_hole(t, height):
    return ((t >= HOLE_T[0]) & (t <= HOLE_T[1])
            & (height >= HOLE_H[0]) & (height <= HOLE_H[1]))


def _draw_with_hole(rng, n):
    t_out, h_out = [], []
    draws = 0
    cap = DRAW_CAP_FACTOR * n
    while len(t_out) < n:
        if draws >= cap:
            raise GenerationError(
                f"hole rejection accepted {len(t_out)} of {n} points in {cap} draws")
        t = rng.uniform(*T_RANGE)
        h = rng.uniform(*HEIGHT_RANGE)
        draws += 1
        if not in_hole(t, h):
            t_out.append(t)
            h_out.append(h)
    log.debug("hole sampling: %d draws for %d points", draws, n)
    return np.array(t_out), np.array(h_out)


def sample_s_curve(spec):
    """Generate the dataset of ``spec`` and keep its curve parameters."""
    rng = np.random.default_rng(int(spec.seed))
    if spec.shape is Shape.S3D_HOLE:
        t, height = _draw_with_hole(rng, spec.n)
    else:
        t = rng.uniform(*T_RANGE, size=spec.n)
        height = rng.uniform(*HEIGHT_RANGE, size=spec.n) if spec.shape is Shape.S3D else None

    points = s_curve(t, height)
    if spec.noise_sigma > 0:
        points = points + rng.normal(0.0, spec.noise_sigma, size=points.shape)
    return SCurveSample(data=Dataset(points), t=t,
                        height=height if height is not None else np.zeros(spec.n))


def generate(spec):
    """Deterministic synthetic dataset for a GenSpec."""
    return sample_s_curve(spec).data


# ────────────────────────────────────────────────────────────────
# CSV
# ────────────────────────────────────────────────────────────────

def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


_FIELD_COUNT = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


def _read_frame(path, **kwargs):
    """pd.read_csv with every text or tokenizer failure raised as DataParseError."""
    try:
        return pd.read_csv(path, dtype=str, na_filter=False, skipinitialspace=True, **kwargs)
    except UnicodeDecodeError as exc:
        raise DataParseError(f"{path}: not UTF-8 text (byte offset {exc.start})") from exc
    except pd.errors.EmptyDataError as exc:
        raise DataParseError(f"{path} is empty") from exc
    except pd.errors.ParserError as exc:
        found = _FIELD_COUNT.search(str(exc))
        if found is None:
            raise DataParseError(f"{path}: ragged rows: {exc}") from exc
        expected, line, saw = map(int, found.groups())
        raise DataParseError(f"{path}: {saw} fields where {expected} were expected",
                             row=line, column=expected + 1) from exc


def load_csv(path):
    """
    Read a numeric CSV into a Dataset.

    A first row without any numeric cell is taken as a header.  Errors name
    the 1-based file row and column.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    frame = _read_frame(path, header=None, skip_blank_lines=True)

    cells = frame.to_numpy()
    first_row = 1
    if len(cells) and not any(_is_number(c) for c in cells[0] if isinstance(c, str)):
        cells = cells[1:]
        first_row = 2
    if not len(cells):
        raise DataParseError(f"{path} has no data rows")

    values = np.empty(cells.shape, dtype=float)
    for r, row in enumerate(cells):
        for c, cell in enumerate(row):
            if not isinstance(cell, str) or cell.strip() == "":
                raise DataParseError(f"{path}: missing value, rows must have equal length",
                                     row=r + first_row, column=c + 1)
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise DataParseError(f"{path}: non-numeric cell {cell!r}",
                                     row=r + first_row, column=c + 1) from None
    if not np.all(np.isfinite(values)):
        bad_r, bad_c = np.argwhere(~np.isfinite(values))[0]
        raise DataParseError(f"{path}: non-finite value",
                             row=int(bad_r) + first_row, column=int(bad_c) + 1)
    log.debug("loaded %s: N=%d d=%d", path, *values.shape)
    return Dataset(values)


def save_csv(data, path, header=True):
    """Write a Dataset as CSV (columns f0 … f{d-1}); values keep full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [f"f{j}" for j in range(data.d)]
    frame = pd.DataFrame(data.patterns, columns=columns)
    frame.to_csv(path, index=False, header=header, float_format="%.17g", lineterminator="\n")
    return path


def save_ordering_csv(ordering, path):
    """Write ``index,slot`` rows, one per pattern in index order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(ordering.slot_of.items())
    frame = pd.DataFrame(rows, columns=["index", "slot"])
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def load_ordering_csv(path, n=None):
    """Read an ``index,slot`` CSV back into a LatentOrdering (optionally checking it covers 0 … n-1)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    frame = _read_frame(path)
    if list(frame.columns) != ["index", "slot"]:
        raise DataParseError(f"{path}: expected header 'index,slot', got {','.join(frame.columns)}",
                             row=1)

    slot_of = {}
    for r, (index, slot) in enumerate(frame.itertuples(index=False, name=None)):
        for c, cell in enumerate((index, slot)):
            if not isinstance(cell, str) or not cell.strip().lstrip("-").isdigit():
                raise DataParseError(f"{path}: expected an integer, got {cell!r}",
                                     row=r + 2, column=c + 1)
        if int(index) in slot_of:
            raise DataParseError(f"{path}: pattern {index} listed twice", row=r + 2, column=1)
        slot_of[int(index)] = int(slot)
    try:
        ordering = LatentOrdering.from_slots(slot_of)
    except InvalidArgumentError as exc:
        raise DataParseError(f"{path}: {exc}") from exc
    if n is not None and not ordering.is_complete(n):
        raise DataParseError(f"{path}: ordering covers {ordering.M} patterns, dataset has N = {n}")
    return ordering
