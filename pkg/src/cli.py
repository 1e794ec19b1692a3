"""
Command-line surface: generate, embed, dsre, oracle, compare, plot, bench.

Exit codes
  0  success
  1  usage error (bad flags, missing seed)
  2  data / parse error (unreadable file, bad CSV, invalid argument)
  3  size-cap refusal (oracle)
"""

import argparse
import logging
import os
import sys
from pathlib import Path

import pandas as pd

from . import bench as bench_mod
from .datasets import (
    DEFAULT_N,
    DEFAULT_SIGMA,
    GenSpec,
    Shape,
    generate,
    load_csv,
    load_ordering_csv,
    save_csv,
    save_ordering_csv,
)
from .embed import Criterion, EmbedConfig, InsertionOrder, Strategy, embed
from .errors import SizeCapError, UnnError
from .knn_core import dsre
from .oracle import DEFAULT_MAX_N, brute_force
from .report import compare, plot_embedding, write_report

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SIZE_CAP = 3


class UsageError(Exception):
    """Bad command-line flags."""


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with argparse's status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _env_positive(name, default):
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return _positive(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"${name}: {exc}") from None


def build_parser():
    parser = _Parser(prog="unn", description="Unsupervised K-nearest neighbor regression on a 1-D latent line.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic S dataset as CSV")
    p.add_argument("--shape", required=True, choices=[s.value for s in Shape])
    p.add_argument("--n", type=_positive, help="pattern count (default: 200 / 500 / 400 by shape)")
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("embed", help="embed a dataset and write the ordering CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.UNN1.value)
    p.add_argument("--criterion", choices=[c.value for c in Criterion], default=Criterion.POINTWISE.value)
    p.add_argument("--order", choices=[o.value for o in InsertionOrder], default=InsertionOrder.DATASET.value)
    p.add_argument("--seed", type=_seed, help="required with --order shuffled")
    p.add_argument("--out", required=True)
    p.add_argument("--trace", help="optional per-insertion trace CSV")

    p = sub.add_parser("dsre", help="print the DSRE of an ordering")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--ordering", required=True)
    p.add_argument("--k", type=_positive, required=True)

    p = sub.add_parser("oracle", help="exhaustive search for the DSRE-optimal ordering")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--max-n", type=_positive, help=f"default $UNN_ORACLE_MAX_N or {DEFAULT_MAX_N}")
    p.add_argument("--workers", type=_positive, help="default $UNN_WORKERS or 1")
    p.add_argument("--out", help="optional ordering CSV of the optimum")

    p = sub.add_parser("compare", help="write the init / UNN 1 / UNN 2 DSRE grid")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="inp")
    src.add_argument("--shape", choices=[s.value for s in Shape])
    p.add_argument("--n", type=_positive)
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p.add_argument("--seed", type=_seed, help="data seed (required with --shape)")
    p.add_argument("--label", help="dataset label in the grid")
    p.add_argument("--ks", type=_int_list, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("plot", help="SVG scatter plot colored by latent slot")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--ordering", help="ordering CSV (default: identity order)")
    p.add_argument("--dims", type=_int_list, default=[0, 1])
    p.add_argument("--title")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="wall time and counted operations per N")
    p.add_argument("--strategy", choices=[s.value for s in Strategy] + ["both"], default="both")
    p.add_argument("--criterion", choices=[c.value for c in Criterion], default=Criterion.POINTWISE.value)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--ns", type=_int_list, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    return parser


# ────────────────────────────────────────────────────────────────
# SUBCOMMANDS
# ────────────────────────────────────────────────────────────────

def _saved(path):
    print(f"SAVED: {Path(path).resolve()}")


def _gen_spec(args):
    shape = Shape(args.shape)
    return GenSpec(shape=shape, n=args.n or DEFAULT_N[shape],
                   noise_sigma=args.sigma, seed=args.seed)


def cmd_generate(args):
    spec = _gen_spec(args)
    _saved(save_csv(generate(spec), args.out))


def cmd_embed(args):
    shuffled = args.order == InsertionOrder.SHUFFLED.value
    if shuffled and args.seed is None:
        raise UsageError("embed: --order shuffled requires --seed")
    if not shuffled and args.seed is not None:
        raise UsageError("embed: --seed is only used with --order shuffled")
    data = load_csv(args.inp)
    config = EmbedConfig(K=args.k, strategy=args.strategy, insertion_order=args.order,
                         criterion=args.criterion, seed=args.seed,
                         track_dsre=bool(args.trace))
    result = embed(data, config)
    _saved(save_ordering_csv(result.ordering, args.out))
    if args.trace:
        trace = pd.DataFrame(
            [[step, r.pattern, r.candidates, r.slot, r.score, r.running_dsre]
             for step, r in enumerate(result.trace)],
            columns=["step", "pattern", "candidates", "slot", "score", "running_dsre"])
        Path(args.trace).parent.mkdir(parents=True, exist_ok=True)
        trace.to_csv(args.trace, index=False, lineterminator="\n")
        _saved(args.trace)
    print(f"final DSRE: {result.final_dsre!r}")


def cmd_dsre(args):
    data = load_csv(args.inp)
    ordering = load_ordering_csv(args.ordering, n=data.N)
    print(f"DSRE: {dsre(ordering, data, args.k)!r}")


def cmd_oracle(args):
    max_n = args.max_n or _env_positive("UNN_ORACLE_MAX_N", DEFAULT_MAX_N)
    workers = args.workers or _env_positive("UNN_WORKERS", 1)
    data = load_csv(args.inp)
    result = brute_force(data, args.k, max_n=max_n, workers=workers)
    print(f"best DSRE: {result.best_dsre!r}")
    print(f"ordering: {' '.join(str(p) for p in result.best_ordering.sequence)}")
    print(f"evaluated: {result.evaluated}")
    if args.out:
        _saved(save_ordering_csv(result.best_ordering, args.out))


def cmd_compare(args):
    if args.shape:
        if args.seed is None:
            raise UsageError("compare: --shape requires --seed")
        spec = _gen_spec(args)
        data, seed, label = generate(spec), spec.seed, args.label or spec.label
    else:
        if args.n is not None or args.seed is not None:
            raise UsageError("compare: --n and --seed only apply with --shape")
        data, seed, label = load_csv(args.inp), None, args.label or Path(args.inp).stem
    report = compare(data, args.ks, seed=seed, label=label)
    csv_path, meta_path = write_report(report, args.out)
    print(report.to_frame().to_string(index=False))
    _saved(csv_path)
    _saved(meta_path)


def cmd_plot(args):
    data = load_csv(args.inp)
    ordering = load_ordering_csv(args.ordering, n=data.N) if args.ordering else None
    svg = plot_embedding(data, ordering, dims=args.dims, title=args.title)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg)
    _saved(out)


def cmd_bench(args):
    strategies = list(Strategy) if args.strategy == "both" else [Strategy(args.strategy)]
    rows = bench_mod.run_bench(strategies, args.k, args.d, args.ns, args.seed,
                               criterion=Criterion(args.criterion))
    print(bench_mod.format_bench(rows))


COMMANDS = {
    "generate": cmd_generate,
    "embed": cmd_embed,
    "dsre": cmd_dsre,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "plot": cmd_plot,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                            format="%(levelname)s %(name)s: %(message)s")
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeCapError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except (UnnError, OSError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK
