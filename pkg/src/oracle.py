"""
Brute-force oracle over latent orderings.

With the latent topology fixed to a line, the ordering is the only decision
variable, so small datasets can be solved exactly by enumerating every
permutation.  Reversed orderings have the same DSRE; by default only the
representative whose first pattern index is smaller than its last is
evaluated, which is also the lexicographically smaller of the pair.
"""

import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SizeCapError
from .knn_core import LatentOrdering, _neighbor_matrix, _reconstruct_rows, _squared_norms, dsre

log = logging.getLogger(__name__)

DEFAULT_MAX_N = 10
# gathered floats per evaluation batch
BATCH_FLOATS = 4_000_000


@dataclass(frozen=True)
class OracleResult:
    best_ordering: LatentOrdering
    best_dsre: float
    evaluated: int


def _batch_dsre(perms, data, K):
    """DSRE of every row of ``perms`` (B x N), bit-identical to dsre()."""
    b, n = perms.shape
    k_eff = min(K, n - 1)
    nbr = _neighbor_matrix(perms, k_eff)
    rec = _reconstruct_rows(data.patterns, nbr.reshape(b * n, k_eff))
    err = _squared_norms(data.patterns[perms.reshape(-1)] - rec).reshape(b, n)
    # pattern-index order per row, as in dsre()
    by_pattern = np.empty_like(err)
    np.put_along_axis(by_pattern, perms, err, axis=1)
    return np.mean(by_pattern, axis=1)


def _permutations_with_head(n, head):
    rest = [p for p in range(n) if p != head]
    for tail in itertools.permutations(rest):
        yield (head,) + tail


def _search_chunk(args):
    """Best (dsre, ordering, evaluated) among the orderings starting with ``head``."""
    data, K, head, dedupe, objective = args
    n = data.N
    k_eff = min(K, n - 1)
    batch = max(256, BATCH_FLOATS // (n * k_eff * data.d))
    best_val, best_perm, evaluated = math.inf, None, 0
    perms = _permutations_with_head(n, head)

    while True:
        rows = list(itertools.islice(perms, batch))
        if not rows:
            break
        arr = np.array(rows, dtype=np.intp)
        if dedupe:
            arr = arr[arr[:, 0] < arr[:, -1]]
            if not len(arr):
                continue
        if objective is None:
            values = _batch_dsre(arr, data, K)
        else:
            values = np.array([objective(LatentOrdering(row), data, K) for row in arr])
        evaluated += len(arr)
        # rows are in lexicographic order: argmin keeps the smallest on ties
        i = int(np.argmin(values))
        if values[i] < best_val:
            best_val, best_perm = float(values[i]), tuple(int(p) for p in arr[i])
    return best_val, best_perm, evaluated


def default_workers():
    raw = os.getenv("UNN_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidArgumentError(f"UNN_WORKERS must be an integer, got {raw!r}") from None


def brute_force(data, K, max_n=DEFAULT_MAX_N, dedupe_reversals=True,
                workers=None, objective=None):
    """
    Global DSRE minimizer over all latent orderings.

    Parameters
    ----------
    data : Dataset with 2 <= N <= max_n
    K : neighborhood size
    max_n : size cap; larger datasets raise SizeCapError
    dedupe_reversals : evaluate one ordering of each reversal pair
    workers : processes for the per-head chunks (default $UNN_WORKERS or 1)
    objective : optional replacement for dsre(ordering, data, K), evaluated
        one ordering at a time

    Returns
    -------
    OracleResult — ties go to the lexicographically smallest ordering.
    """
    n = data.N
    if n > max_n:
        raise SizeCapError(n, max_n)
    if n < 2:
        raise InvalidArgumentError(f"brute force needs N >= 2, got N = {n}")
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    workers = default_workers() if workers is None else max(1, int(workers))

    # with deduplication an ordering must start below its last pattern,
    # so the largest index never leads
    heads = range(n - 1) if dedupe_reversals else range(n)
    tasks = [(data, K, head, dedupe_reversals, objective) for head in heads]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_search_chunk, tasks))
    else:
        chunks = [_search_chunk(task) for task in tasks]

    for head, (val, _, count) in zip(heads, chunks):
        log.debug("head %d: %d orderings, best %.6g", head, count, val)

    # chunks are in head order; strict < keeps the lexicographically smallest
    best_val, best_perm = math.inf, None
    for val, perm, _ in chunks:
        if perm is not None and val < best_val:
            best_val, best_perm = val, perm
    evaluated = sum(count for _, _, count in chunks)

    best = LatentOrdering(best_perm)
    best_dsre = best_val if objective is not None else dsre(best, data, K)
    log.info("oracle N=%d K=%d: %d orderings, best DSRE %.6g", n, K, evaluated, best_dsre)
    return OracleResult(best_ordering=best, best_dsre=best_dsre, evaluated=evaluated)


def naive_dsre(ordering, data, K):
    """
    Independent loop-by-loop DSRE, used to cross-check the vectorized one.

    Neighbors of each slot are chosen by (latent distance, pattern index)
    and averaged with plain Python floats.
    """
    seq = ordering.sequence
    m = len(seq)
    k_eff = min(K, m - 1)
    rows = data.patterns.tolist()
    total = 0.0
    for s, p in enumerate(seq):
        others = sorted((abs(s - t), seq[t]) for t in range(m) if t != s)
        nbrs = [q for _, q in others[:k_eff]]
        err = 0.0
        for c in range(data.d):
            mean = sum(rows[q][c] for q in nbrs) / k_eff
            err += (rows[p][c] - mean) ** 2
        total += err
    return total / m
