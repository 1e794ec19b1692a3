"""
KNN Core — data model and reconstruction error
───────────────────────────────────────────────
Patterns live in a d-dimensional data space; their latent positions are
equidistant slots on a line, so a latent ordering (which pattern sits in
which slot) is the only thing that decides the K-nearest-neighbor
regression of every pattern.

Pipeline per pattern:
  1. latent_neighbors()   — the K' = min(K, M-1) nearest slots, self excluded
  2. knn_reconstruct()    — mean of the neighbors' data vectors
  3. pointwise_error()    — squared Euclidean residual
  4. dsre()               — mean of the residuals over all N patterns

Ties in latent distance go to the smaller key.  Without keys the key is
the slot itself (left slot first); reconstruction passes the pattern index
that occupies each slot, which keeps every neighbor set unchanged when the
ordering is reversed.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgumentError, NoNeighborsError


# ────────────────────────────────────────────────────────────────
# DATA MODEL
# ────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class Dataset:
    """
    N patterns in d-dimensional data space (row i = pattern i).

    A 1-D array is read as N patterns of dimension 1.  The stored matrix
    is a read-only float64 copy.
    """
    patterns: np.ndarray

    def __post_init__(self):
        arr = np.array(self.patterns, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise InvalidArgumentError(
                f"patterns must be an N x d matrix, got {arr.ndim} dimensions")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidArgumentError(
                f"dataset needs N >= 1 and d >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("patterns contain NaN or Inf")
        arr.setflags(write=False)
        object.__setattr__(self, "patterns", arr)

    @property
    def N(self):
        return self.patterns.shape[0]

    @property
    def d(self):
        return self.patterns.shape[1]

    def transformed(self, matrix=None, shift=None, scale=1.0):
        """Return a new Dataset with every pattern mapped to scale * (y @ matrix) + shift."""
        y = self.patterns
        if matrix is not None:
            y = y @ np.asarray(matrix, dtype=float)
        y = y * scale
        if shift is not None:
            y = y + np.asarray(shift, dtype=float)
        return Dataset(y)


@dataclass(frozen=True)
class LatentOrdering:
    """
    Patterns placed on equidistant latent slots 0 … M-1.

    ``sequence[s]`` is the pattern index in slot s; ``slot_of`` is the
    inverse map.  Only the relative order carries meaning.
    """
    sequence: tuple

    def __post_init__(self):
        seq = tuple(int(p) for p in self.sequence)
        if any(p < 0 for p in seq):
            raise InvalidArgumentError("pattern indices must be non-negative")
        if len(set(seq)) != len(seq):
            raise InvalidArgumentError("a pattern can occupy only one latent slot")
        object.__setattr__(self, "sequence", seq)

    @classmethod
    def identity(cls, n):
        """Patterns in dataset-row order."""
        return cls(tuple(range(n)))

    @classmethod
    def empty(cls):
        return cls(())

    @classmethod
    def from_slots(cls, slot_of):
        """Build from a pattern -> slot mapping whose slots are exactly 0 … M-1."""
        m = len(slot_of)
        seq = [None] * m
        for pattern, slot in slot_of.items():
            slot = int(slot)
            if not 0 <= slot < m or seq[slot] is not None:
                raise InvalidArgumentError(
                    f"slots must form a bijection onto 0..{m - 1}, bad slot {slot}")
            seq[slot] = int(pattern)
        return cls(tuple(seq))

    @property
    def M(self):
        return len(self.sequence)

    @cached_property
    def slot_of(self):
        return {p: s for s, p in enumerate(self.sequence)}

    @cached_property
    def array(self):
        arr = np.array(self.sequence, dtype=np.intp)
        arr.setflags(write=False)
        return arr

    def reversed(self):
        return LatentOrdering(self.sequence[::-1])

    def is_complete(self, n):
        """True when the ordering is a permutation of 0 … n-1."""
        return self.M == n and set(self.sequence) == set(range(n))


@dataclass(frozen=True)
class NeighborSet:
    """Neighbor slots (or pattern indices) sorted by latent distance, ties by key."""
    indices: tuple
    K: int


# ────────────────────────────────────────────────────────────────
# LATENT NEIGHBORHOODS
# ────────────────────────────────────────────────────────────────

def latent_neighbors(slot, M, K, keys=None):
    """
    The min(K, M-1) slots nearest to ``slot`` on a line of M slots.

    The query slot itself is never a neighbor.  Candidates are ranked by
    (|slot - j|, keys[j]); ``keys`` defaults to the slots, i.e. the left
    slot wins a tie.

    >>> latent_neighbors(2, 5, 3).indices
    (1, 3, 0)
    """
    if M < 1:
        raise InvalidArgumentError("latent line is empty (M = 0)")
    if not 0 <= slot < M:
        raise InvalidArgumentError(f"slot {slot} outside 0..{M - 1}")
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    if keys is None:
        keys = range(M)
    elif len(keys) != M:
        raise InvalidArgumentError("keys must give one key per slot")

    k_eff = min(K, M - 1)
    ranked = sorted((j for j in range(M) if j != slot),
                    key=lambda j: (abs(slot - j), keys[j]))
    return NeighborSet(tuple(ranked[:k_eff]), K)


def _side_counts(left_avail, right_avail, k_eff, left_key, right_key):
    """
    How many of the k_eff neighbors come from the left and the right.

    Each side gets k_eff // 2; for odd k_eff the remaining neighbor sits at
    distance k_eff // 2 + 1 and goes to the side with the smaller key.
    Sides that run out of slots hand their share to the other side.
    Arguments broadcast against each other.
    """
    left = k_eff // 2 + (k_eff % 2) * (left_key < right_key)
    left = np.minimum(left, left_avail)
    left = np.where(k_eff - left > right_avail, k_eff - right_avail, left)
    return left, k_eff - left


def _neighbor_matrix(seq, k_eff):
    """
    Pattern indices of the latent neighbors of every slot of ``seq``.

    ``seq`` is one ordering (M,) or a stack of orderings (B, M); the
    result has shape (M, k_eff) or (B, M, k_eff).
    """
    m = seq.shape[-1]
    pos = np.arange(m)
    half = k_eff // 2
    left_key = seq[..., np.clip(pos - half - 1, 0, m - 1)]
    right_key = seq[..., np.clip(pos + half + 1, 0, m - 1)]
    left, _ = _side_counts(pos, m - 1 - pos, k_eff, left_key, right_key)
    win = (pos - left)[..., None] + np.arange(k_eff)
    # skip over the query slot itself
    win = win + (win >= pos[:, None])
    flat = win.reshape(*seq.shape[:-1], -1)
    return np.take_along_axis(seq, flat, axis=-1).reshape(win.shape)


def _insertion_neighbor_matrix(seq, slots, k_eff):
    """Pattern indices a new pattern would see when inserted before each of ``slots``."""
    m = len(seq)
    slots = np.asarray(slots, dtype=np.intp)
    half = k_eff // 2
    left_key = seq[np.clip(slots - half - 1, 0, m - 1)]
    right_key = seq[np.clip(slots + half, 0, m - 1)]
    left, _ = _side_counts(slots, m - slots, k_eff, left_key, right_key)
    win = (slots - left)[:, None] + np.arange(k_eff)[None, :]
    return seq[win]


# ────────────────────────────────────────────────────────────────
# RECONSTRUCTION
# ────────────────────────────────────────────────────────────────

def _reconstruct_rows(patterns, neighbor_idx):
    """
    Mean of the neighbor vectors for each row of ``neighbor_idx``.

    Neighbors are summed one column at a time in ascending pattern index,
    so a row's result does not depend on the batch it is computed in.
    """
    idx = np.sort(neighbor_idx, axis=1)
    acc = patterns[idx[:, 0]].copy()
    for j in range(1, idx.shape[1]):
        acc += patterns[idx[:, j]]
    return acc / idx.shape[1]


def _squared_norms(residuals):
    """Row-wise ‖r‖², accumulated column by column (batch-independent like _reconstruct_rows)."""
    sq = residuals * residuals
    acc = sq[:, 0].copy()
    for j in range(1, sq.shape[1]):
        acc += sq[:, j]
    return acc


def _check_embedded(ordering, data):
    if ordering.M and max(ordering.sequence) >= data.N:
        raise InvalidArgumentError(
            f"ordering refers to pattern {max(ordering.sequence)} but N = {data.N}")


def knn_reconstruct(i, ordering, data, K):
    """
    KNN regression of pattern i from its latent neighbors.

    Returns the mean of the data vectors of latent_neighbors(slot_of(i)).
    """
    _check_embedded(ordering, data)
    if i not in ordering.slot_of:
        raise InvalidArgumentError(f"pattern {i} is not embedded")
    if ordering.M < 2:
        raise NoNeighborsError("reconstruction needs at least one other embedded pattern")
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    nbr_slots = latent_neighbors(ordering.slot_of[i], ordering.M, K,
                                 keys=ordering.sequence).indices
    idx = ordering.array[list(nbr_slots)]
    return _reconstruct_rows(data.patterns, idx[None, :])[0]


def pointwise_error(i, ordering, data, K):
    """Squared Euclidean residual ‖y_i − reconstruction(i)‖²."""
    rec = knn_reconstruct(i, ordering, data, K)
    return float(_squared_norms(data.patterns[i][None, :] - rec[None, :])[0])


def embedded_errors(ordering, data, K):
    """
    Pointwise errors of every embedded pattern, in slot order.

    Works on partial orderings (the patterns not embedded are ignored).
    """
    _check_embedded(ordering, data)
    if ordering.M < 2:
        raise NoNeighborsError("reconstruction needs at least two embedded patterns")
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    seq = ordering.array
    rec = _reconstruct_rows(data.patterns, _neighbor_matrix(seq, min(K, ordering.M - 1)))
    return _squared_norms(data.patterns[seq] - rec)


def all_pointwise_errors(ordering, data, K):
    """Vector e with e[i] = pointwise_error(i) for every pattern of a complete ordering."""
    if not ordering.is_complete(data.N):
        raise InvalidArgumentError(
            f"ordering embeds {ordering.M} patterns, dataset has N = {data.N}")
    errors = np.empty(data.N)
    errors[ordering.array] = embedded_errors(ordering, data, K)
    return errors


def embedded_dsre(ordering, data, K):
    """Mean pointwise error over the embedded patterns of a (possibly partial) ordering."""
    errors = embedded_errors(ordering, data, K)
    # pattern-index order, as in dsre()
    return float(np.mean(errors[np.argsort(ordering.array)]))


def dsre(ordering, data, K):
    """
    Data space reconstruction error of a complete ordering:
    (1/N) · Σ_i ‖y_i − knn_reconstruct(i)‖².
    """
    if data.N < 2:
        raise NoNeighborsError("DSRE needs N >= 2")
    return float(np.mean(all_pointwise_errors(ordering, data, K)))
