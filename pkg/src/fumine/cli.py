"""``fumine`` command line: mine, gen, verify."""

from __future__ import annotations

import argparse
import sys

from . import io
from .baselines import DEFAULT_NODE_BUDGET, brute_force_mine, compare_results, pfus_like_mine
from .miner import MiningConfig, mine
from .model import FumineError

ALGORITHMS = ("pgfum", "pfus", "brute")


def _load(args):
    db = io.parse_database(args.db, args.utility)
    mf = io.parse_membership(args.membership)
    return db, mf


def _run(name, db, mf, cfg):
    if name == "pgfum":
        return mine(db, mf, cfg)
    if name == "pfus":
        return pfus_like_mine(db, mf, cfg.xi, node_budget=cfg.node_budget)
    return brute_force_mine(db, mf, cfg.xi, cfg.max_length or 10**9, node_budget=cfg.node_budget)


def _config(args, **overrides) -> MiningConfig:
    return MiningConfig(
        xi=args.min_ratio,
        enable_ppo=not getattr(args, "no_ppo", False),
        enable_eud=not getattr(args, "no_eud", False),
        enable_pes=not getattr(args, "no_pes", False),
        max_length=getattr(args, "max_length", None),
        parallel_width=getattr(args, "parallel", 0),
        node_budget=args.node_budget,
        **overrides,
    )


def cmd_mine(args) -> int:
    cfg = _config(args)
    db, mf = _load(args)
    result = _run(args.algorithm, db, mf, cfg)
    io.write_results(result, args.output)
    if args.stats:
        io.write_stats(result, db, args.stats, cfg, args.algorithm)
    return 0


def cmd_gen(args) -> int:
    params = io.GeneratorParams(
        n_sequences=args.sequences,
        n_items=args.items,
        max_seq_itemsets=args.max_seq_len,
        max_itemset_size=args.max_itemset,
        max_quantity=args.max_qty,
        utility_range=(args.umin, args.umax),
        seed=args.seed,
        skew=args.skew,
    )
    io.generate_synthetic(params, args.db_out, args.utility_out)
    return 0


def cmd_verify(args) -> int:
    names = [a.strip() for a in args.algorithms.split(",")]
    if len(names) != 2 or any(n not in ALGORITHMS for n in names):
        raise FumineError(f"--algorithms takes two of {','.join(ALGORITHMS)}, got {args.algorithms!r}")
    cfg = _config(args)
    db, mf = _load(args)
    a, b = (_run(n, db, mf, cfg) for n in names)
    report = compare_results(a, b)
    print(f"{report} ({names[0]} vs {names[1]})")
    return 0 if report.match else 1


def _ratio(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fumine", description="High fuzzy-utility sequential pattern mining.")
    sub = p.add_subparsers(dest="command", required=True)

    def inputs(sp):
        sp.add_argument("--db", required=True, help="q-sequence database file")
        sp.add_argument("--utility", required=True, help="external utility table")
        sp.add_argument("--membership", required=True, help="membership function file")
        sp.add_argument("--min-ratio", type=_ratio, required=True, help="minimum fuzzy-utility ratio xi in (0, 1]")
        sp.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET, help="abort after this many candidates")

    m = sub.add_parser("mine", help="mine high fuzzy-utility sequential patterns")
    inputs(m)
    m.add_argument("--algorithm", choices=ALGORITHMS, default="pgfum")
    m.add_argument("--no-ppo", action="store_true", help="disable the 1-sequence pre-pruning")
    m.add_argument("--no-eud", action="store_true", help="disable the subtree (SDFU) pruning")
    m.add_argument("--no-pes", action="store_true", help="disable the extension (EIFU) pruning")
    m.add_argument("--max-length", type=int, default=None)
    m.add_argument("--parallel", type=int, default=0, help="worker processes (0 runs in-process)")
    m.add_argument("--stats", default=None, help="write a key: value stats report here")
    m.add_argument("--output", required=True)
    m.set_defaults(func=cmd_mine)

    g = sub.add_parser("gen", help="generate a synthetic database and utility table")
    g.add_argument("--sequences", type=int, required=True)
    g.add_argument("--items", type=int, required=True)
    g.add_argument("--max-seq-len", type=int, required=True, help="max itemsets per sequence")
    g.add_argument("--max-itemset", type=int, required=True, help="max q-items per itemset")
    g.add_argument("--max-qty", type=int, required=True)
    g.add_argument("--umin", type=float, required=True)
    g.add_argument("--umax", type=float, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--skew", type=float, default=0.0, help="Zipf exponent of item popularity")
    g.add_argument("--db-out", required=True)
    g.add_argument("--utility-out", required=True)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run two algorithms and compare their pattern sets")
    inputs(v)
    v.add_argument("--algorithms", default="pgfum,brute")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FumineError, OSError) as e:
        print(f"fumine: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
