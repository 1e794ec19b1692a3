"""
Runtime scaling of the two strategies.

Step counts follow the cost model of the strategies: scoring one gap costs
K'·d (one reconstruction evaluation), finding y* costs M·d (M distance
evaluations).  Wall time is reported next to the counts.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .embed import Criterion, EmbedConfig, Strategy, embed
from .knn_core import Dataset

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchRow:
    strategy: str
    n: int
    wall_s: float
    distance_evals: int
    reconstruction_evals: int
    work: int
    last_insertion_work: int
    linear_r2: float


def bench_data(n, d, seed):
    """Standard-normal patterns, seeded."""
    return Dataset(np.random.default_rng(int(seed)).standard_normal((n, d)))


def work_linearity(per_insertion):
    """R² of a straight-line fit of per-insertion work against the embedded count M."""
    work = np.asarray(per_insertion, dtype=float)
    if len(work) < 3 or np.ptp(work) == 0:
        return 1.0
    return float(linregress(np.arange(len(work)), work).rvalue ** 2)


def run_bench(strategies, K, d, ns, seed, criterion=Criterion.POINTWISE):
    """One BenchRow per (N, strategy), N in the order given."""
    rows = []
    for n in ns:
        data = bench_data(n, d, seed)
        for strategy in strategies:
            config = EmbedConfig(K=K, strategy=Strategy(strategy), criterion=criterion)
            start = time.perf_counter()
            result = embed(data, config)
            wall = time.perf_counter() - start
            counts = result.counts
            rows.append(BenchRow(
                strategy=config.strategy.value, n=n, wall_s=wall,
                distance_evals=counts.distance_evals,
                reconstruction_evals=counts.reconstruction_evals,
                work=counts.work,
                last_insertion_work=counts.per_insertion[-1],
                linear_r2=work_linearity(counts.per_insertion),
            ))
            log.debug("bench %s N=%d: %.3fs", config.strategy.value, n, wall)
    return rows


def work_ratios(rows):
    """UNN 1 : UNN 2 counted-work ratio per N (only where both strategies ran)."""
    by_n = {}
    for row in rows:
        by_n.setdefault(row.n, {})[row.strategy] = row.work
    return {n: w[Strategy.UNN1.value] / w[Strategy.UNN2.value]
            for n, w in by_n.items()
            if Strategy.UNN1.value in w and w.get(Strategy.UNN2.value)}


def format_bench(rows):
    """Plain-text table of the bench rows plus the work ratios."""
    lines = [f"{'strategy':<9}{'N':>7}{'wall_s':>10}{'dist_evals':>13}"
             f"{'recon_evals':>13}{'work':>15}{'last_step':>12}{'R2':>8}",
             "-" * 87]
    for r in rows:
        lines.append(f"{r.strategy:<9}{r.n:>7}{r.wall_s:>10.3f}{r.distance_evals:>13}"
                     f"{r.reconstruction_evals:>13}{r.work:>15}{r.last_insertion_work:>12}"
                     f"{r.linear_r2:>8.4f}")
    for n, ratio in work_ratios(rows).items():
        lines.append(f"N={n}: UNN 1 : UNN 2 counted work = {ratio:.2f}")
    return "\n".join(lines)
