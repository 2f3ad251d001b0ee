"""Command line front end: generate graphs and data, learn, benchmark, check.

Subcommands:
  generate      write a random DAG as an edge list, optionally with a
                simulated linear-Gaussian dataset next to it
  learn         recover a PDAG from a truth graph (exact oracle) or from a
                CSV dataset (partial-correlation tests) and print a metrics
                row
  bench         run a seeded experiment described by a key=value config file
                and emit the results CSV
  oracle-check  report whether a learned PDAG is Markov equivalent to a
                truth DAG

Exit codes: 0 on success, 1 on argument or input errors, 2 on internal
errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .bench import (
    load_config,
    pc_baseline,
    rows_to_csv,
    run_experiment,
    simulate_dataset,
    skeleton_metrics,
)
from .ci import GaussianCiConfig, dsep_oracle, fisher_z_oracle, load_dataset, save_dataset
from .graph import load_dag, load_pdag, markov_equivalent, save_dag, save_pdag
from .marvel import marvel_learn
from .mb import total_conditioning
from .synth import cluster_adversarial_dag, erdos_renyi_dag, fixed_indegree_dag


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with status 1 on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="marvel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a random DAG (and optional dataset)")
    gen.add_argument(
        "--generator",
        choices=("erdos_renyi", "fixed_indegree", "cluster"),
        required=True,
    )
    gen.add_argument("--p", type=int, required=True, help="number of vertices")
    gen.add_argument("--m", type=int, help="edge count (erdos_renyi)")
    gen.add_argument(
        "--delta-in", type=int, help="in-degree parameter (fixed_indegree, cluster)"
    )
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="edge-list output path")
    gen.add_argument("--data", help="also write a CSV dataset to this path")
    gen.add_argument("--n-samples", type=int, help="rows for --data")
    gen.set_defaults(run=_cmd_generate)

    learn = sub.add_parser("learn", help="learn a PDAG and print a metrics row")
    learn.add_argument("--graph", help="truth DAG edge list (exact oracle input)")
    learn.add_argument("--data", help="CSV dataset (statistical oracle input)")
    learn.add_argument("--algo", choices=("marvel", "pc"), default="marvel")
    learn.add_argument("--oracle", choices=("dsep", "fisher_z"))
    learn.add_argument("--alpha", type=float, help="test level (fisher_z only)")
    learn.add_argument("--out", help="write the learned PDAG here")
    learn.set_defaults(run=_cmd_learn)

    bench = sub.add_parser("bench", help="run an experiment config, emit CSV")
    bench.add_argument("config", help="flat key=value experiment config file")
    bench.add_argument("--out", help="CSV output path (default: stdout)")
    bench.add_argument("--algo", choices=("marvel", "pc"), help="override config")
    bench.add_argument("--alpha", type=float, help="override config")
    bench.add_argument("--seed", type=int, help="run this single seed instead")
    bench.set_defaults(run=_cmd_bench)

    check = sub.add_parser(
        "oracle-check", help="compare a learned PDAG against a truth DAG"
    )
    check.add_argument("--learned", required=True, help="PDAG file")
    check.add_argument("--truth", required=True, help="DAG edge-list file")
    check.set_defaults(run=_cmd_oracle_check)

    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    if args.generator == "erdos_renyi":
        if args.m is None:
            raise ValueError("erdos_renyi needs --m")
        g = erdos_renyi_dag(args.p, args.m, args.seed)
    elif args.generator == "fixed_indegree":
        if args.delta_in is None:
            raise ValueError("fixed_indegree needs --delta-in")
        g = fixed_indegree_dag(args.p, args.delta_in, args.seed)
    else:
        if args.delta_in is None:
            raise ValueError("cluster needs --delta-in")
        g = cluster_adversarial_dag(args.p, args.delta_in)
    save_dag(g, args.out)
    print(f"wrote {args.out} (p={g.p}, m={g.n_edges})")
    if args.data is not None:
        if args.n_samples is None:
            raise ValueError("--data needs --n-samples")
        dataset = simulate_dataset(g, args.n_samples, args.seed)
        save_dataset(dataset, args.data)
        print(f"wrote {args.data} ({dataset.n} rows)")
    elif args.n_samples is not None:
        raise ValueError("--n-samples needs --data")
    return 0


def _cmd_learn(args: argparse.Namespace) -> int:
    if (args.graph is None) == (args.data is None):
        raise ValueError("give exactly one of --graph or --data")
    oracle_kind = args.oracle or ("dsep" if args.graph else "fisher_z")
    if oracle_kind == "dsep":
        if args.graph is None:
            raise ValueError("the dsep oracle needs --graph")
        if args.alpha is not None:
            raise ValueError("--alpha applies to the fisher_z oracle only")
        truth = load_dag(args.graph)
        oracle = dsep_oracle(truth)
    else:
        if args.data is None:
            raise ValueError("the fisher_z oracle needs --data")
        truth = None
        dataset = load_dataset(args.data)
        config = (
            GaussianCiConfig(alpha=args.alpha) if args.alpha is not None else None
        )
        oracle = fisher_z_oracle(dataset, config)

    mb0 = total_conditioning(oracle)
    mb_tests = oracle.stats().n_tests
    learner = marvel_learn if args.algo == "marvel" else pc_baseline
    result = learner(oracle, mb0)
    if args.out:
        save_pdag(result.essential, args.out)
        print(f"wrote {args.out}")
    for line in result.warnings:
        print(f"warning: {line}", file=sys.stderr)

    m = result.metrics
    parts = [
        f"mb_tests={mb_tests}",
        f"post_tests={m.n_tests}",
        f"asc={m.asc:.6g}",
        f"max_cond={m.max_cond}",
    ]
    if truth is not None:
        precision, recall, f1 = skeleton_metrics(result.essential, truth)
        parts += [
            f"precision={precision:.6g}",
            f"recall={recall:.6g}",
            f"f1={f1:.6g}",
        ]
    parts.append(f"warnings={m.warnings}")
    print(" ".join(parts))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.algo is not None:
        cfg = replace(cfg, algo=args.algo)
    if args.alpha is not None:
        cfg = replace(cfg, alpha=args.alpha)
    if args.seed is not None:
        cfg = replace(cfg, seeds=(args.seed,))
    rows = run_experiment(cfg)
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    learned = load_pdag(args.learned)
    truth = load_dag(args.truth)
    verdict = markov_equivalent(learned, truth)
    print(f"equivalent: {'true' if verdict else 'false'}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.run(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
