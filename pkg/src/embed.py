"""
Iterative UNN embedding
───────────────────────
Patterns are inserted one at a time into a growing latent ordering.

  UNN 1 — test all M+1 gaps of the M embedded patterns
  UNN 2 — find the data-space nearest embedded pattern y* and test only
          the two gaps next to it

Every candidate gap is scored with score_insertion(); the pattern goes into
the gap with the lowest score (smallest slot on ties).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidArgumentError
from .knn_core import (
    LatentOrdering,
    _insertion_neighbor_matrix,
    _reconstruct_rows,
    _squared_norms,
    dsre,
    embedded_dsre,
)

log = logging.getLogger(__name__)

MAX_SEED = 2 ** 64


class Strategy(str, Enum):
    UNN1 = "unn1"
    UNN2 = "unn2"


class InsertionOrder(str, Enum):
    DATASET = "dataset"
    SHUFFLED = "shuffled"


class Criterion(str, Enum):
    POINTWISE = "pointwise"
    FULL_DSRE = "full-dsre"


@dataclass(frozen=True)
class EmbedConfig:
    """
    Parameters of one embedding run.

    K               : neighborhood size (>= 1)
    strategy        : UNN1 (all gaps) or UNN2 (gaps next to y*)
    insertion_order : dataset row order, or a seeded shuffle
    criterion       : POINTWISE scores the inserted pattern's own error,
                      FULL_DSRE the DSRE of all embedded patterns
    seed            : 64-bit unsigned, required exactly when shuffled
    track_dsre      : record the running DSRE after every insertion
    """
    K: int
    strategy: Strategy = Strategy.UNN1
    insertion_order: InsertionOrder = InsertionOrder.DATASET
    criterion: Criterion = Criterion.POINTWISE
    seed: int = None
    track_dsre: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "strategy", Strategy(self.strategy))
            object.__setattr__(self, "insertion_order", InsertionOrder(self.insertion_order))
            object.__setattr__(self, "criterion", Criterion(self.criterion))
        except ValueError as exc:
            raise InvalidArgumentError(str(exc)) from exc
        if int(self.K) != self.K or self.K < 1:
            raise InvalidArgumentError(f"K must be an integer >= 1, got {self.K}")
        object.__setattr__(self, "K", int(self.K))
        shuffled = self.insertion_order is InsertionOrder.SHUFFLED
        if shuffled and self.seed is None:
            raise InvalidArgumentError("a shuffled insertion order needs a seed")
        if not shuffled and self.seed is not None:
            raise InvalidArgumentError("a seed is only used with the shuffled insertion order")
        if self.seed is not None and not 0 <= int(self.seed) < MAX_SEED:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class InsertionRecord:
    pattern: int
    candidates: int
    slot: int
    score: float
    running_dsre: float = None


@dataclass
class OpCounts:
    """
    Counted primitive operations of a run.

    A distance evaluation compares two d-vectors; a reconstruction
    evaluation averages K' d-vectors.  ``per_insertion`` holds the counted
    work distance_evals·d + reconstruction_evals·K'·d of every step.
    """
    d: int
    distance_evals: int = 0
    reconstruction_evals: int = 0
    per_insertion: list = field(default_factory=list)

    def record(self, distances, reconstructions, k_eff):
        self.distance_evals += distances
        self.reconstruction_evals += reconstructions
        self.per_insertion.append(distances * self.d + reconstructions * k_eff * self.d)

    @property
    def work(self):
        return sum(self.per_insertion)


@dataclass(frozen=True)
class EmbedResult:
    ordering: LatentOrdering
    final_dsre: float
    trace: tuple
    counts: OpCounts
    config: EmbedConfig


# ────────────────────────────────────────────────────────────────
# CANDIDATE SLOTS
# ────────────────────────────────────────────────────────────────

def candidate_slots_unn1(partial):
    """All M+1 insert-before positions 0 … M (slot M appends)."""
    return list(range(partial.M + 1))


def nearest_embedded(partial, y, data):
    """Embedded pattern closest to y in data space; ties go to the smaller index."""
    if partial.M == 0:
        raise InvalidArgumentError("no pattern embedded yet; insert the first one at slot 0")
    embedded = np.sort(partial.array)
    dists = cdist(np.asarray(y, dtype=float).reshape(1, -1),
                  data.patterns[embedded], metric="sqeuclidean")[0]
    return int(embedded[np.argmin(dists)])


def candidate_slots_unn2(partial, y, data):
    """The gaps immediately before and after y*, the nearest embedded pattern."""
    s = partial.slot_of[nearest_embedded(partial, y, data)]
    return [s, s + 1]


def insert_at(partial, pattern, slot):
    """Place ``pattern`` at ``slot``; patterns at slots >= slot move one to the right."""
    if not 0 <= slot <= partial.M:
        raise InvalidArgumentError(f"insertion slot {slot} outside 0..{partial.M}")
    if pattern in partial.slot_of:
        raise InvalidArgumentError(f"pattern {pattern} is already embedded")
    seq = partial.sequence
    return LatentOrdering(seq[:slot] + (int(pattern),) + seq[slot:])


# ────────────────────────────────────────────────────────────────
# SCORING
# ────────────────────────────────────────────────────────────────

def insertion_scores(partial, pattern, slots, data, config):
    """
    score_insertion() for several slots of the same partial state at once.

    Each score depends only on the frozen partial state, so the batch
    gives the same values as scoring the slots one by one.
    """
    slots = [int(s) for s in slots]
    for s in slots:
        if not 0 <= s <= partial.M:
            raise InvalidArgumentError(f"insertion slot {s} outside 0..{partial.M}")
    if pattern in partial.slot_of:
        raise InvalidArgumentError(f"pattern {pattern} is already embedded")
    if not 0 <= pattern < data.N:
        raise InvalidArgumentError(f"pattern {pattern} outside 0..{data.N - 1}")
    if partial.M == 0:
        # no neighbors, nothing to reconstruct
        return np.zeros(len(slots))

    if config.criterion is Criterion.FULL_DSRE:
        return np.array([embedded_dsre(insert_at(partial, pattern, s), data, config.K)
                         for s in slots])

    k_eff = min(config.K, partial.M)
    nbr = _insertion_neighbor_matrix(partial.array, slots, k_eff)
    rec = _reconstruct_rows(data.patterns, nbr)
    return _squared_norms(data.patterns[pattern][None, :] - rec)


def score_insertion(partial, pattern, slot, data, config):
    """Criterion value of inserting ``pattern`` at ``slot``; 0 for the first pattern."""
    return float(insertion_scores(partial, pattern, [slot], data, config)[0])


# ────────────────────────────────────────────────────────────────
# EMBEDDING
# ────────────────────────────────────────────────────────────────

def insertion_sequence(n, config):
    """Order in which the patterns are presented to the embedding."""
    if config.insertion_order is InsertionOrder.SHUFFLED:
        return [int(p) for p in np.random.default_rng(int(config.seed)).permutation(n)]
    return list(range(n))


def embed(data, config):
    """
    Embed all N patterns with the configured strategy.

    Returns the complete ordering, its DSRE, one trace record per
    insertion and the counted operations.  Deterministic given the
    dataset and config.
    """
    if data.N < 2:
        raise InvalidArgumentError(f"embedding needs N >= 2, got N = {data.N}")

    partial = LatentOrdering.empty()
    counts = OpCounts(d=data.d)
    trace = []
    report_every = max(1, data.N // 10)

    for step, pattern in enumerate(insertion_sequence(data.N, config)):
        m = partial.M
        distances = 0
        if m == 0:
            slots = [0]
        elif config.strategy is Strategy.UNN1:
            slots = candidate_slots_unn1(partial)
        else:
            slots = candidate_slots_unn2(partial, data.patterns[pattern], data)
            distances = m

        scores = insertion_scores(partial, pattern, slots, data, config)
        # slots ascend, so argmin keeps the smallest slot on ties
        best = int(np.argmin(scores))
        partial = insert_at(partial, pattern, slots[best])

        per_candidate = (m + 1) if config.criterion is Criterion.FULL_DSRE else 1
        counts.record(distances, len(slots) * per_candidate if m else 0, min(config.K, m))

        running = None
        if config.track_dsre and partial.M >= 2:
            running = embedded_dsre(partial, data, config.K)
        trace.append(InsertionRecord(pattern=pattern, candidates=len(slots),
                                     slot=slots[best], score=float(scores[best]),
                                     running_dsre=running))

        if (step + 1) % report_every == 0:
            log.debug("%s: embedded %d/%d patterns", config.strategy.value, step + 1, data.N)

    final = dsre(partial, data, config.K)
    log.info("%s K=%d: final DSRE %.6g over %d patterns",
             config.strategy.value, config.K, final, data.N)
    return EmbedResult(ordering=partial, final_dsre=final, trace=tuple(trace),
                       counts=counts, config=config)
