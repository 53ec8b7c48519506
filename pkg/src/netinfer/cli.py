"""Command-line interface.

Subcommands:
  simulate  generate one synthetic system (series/truth/meta files)
  infer     run one inference method on a series CSV
  bench     run a full benchmark grid from a JSON config
  eval      compare an estimated network against a truth network

Exit codes: 0 success, 1 computation failure (including a benchmark
method failing on every run), 2 usage or input-format error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .data import (
    load_adjacency_csv,
    load_json,
    load_series_csv,
    save_adjacency_csv,
    save_edges_tsv,
)
from .errors import InvalidInputError, NetinferError, ParseError
from .harness import ALL_METHODS, ExperimentConfig, run_experiment
from .metrics import confusion, rates
from .nlasso import infer_nlasso
from .nsvm import infer_nsvm
from .rbn import learn_rbn
from .simulate import SimConfig, save_sim, simulate, with_seed

KERNEL_CHOICES = ("linear", "rbf", "sigmoid", "poly")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netinfer",
        description="Directed network inference from multivariate time series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic system")
    p_sim.add_argument("--config", required=True, help="SimConfig JSON file")
    p_sim.add_argument("--seed", type=int, default=None, help="override config seed")
    p_sim.add_argument("--out", default=".", help="output directory")

    p_inf = sub.add_parser("infer", help="infer a network from a series CSV")
    p_inf.add_argument("series", help="input series CSV (header X1..Xp)")
    p_inf.add_argument("--method", default="nsvm",
                       choices=("nsvm", "rbn", "nlasso"))
    p_inf.add_argument("--kernel", default=None, choices=KERNEL_CHOICES,
                       help="kernel family for nsvm (default sigmoid)")
    p_inf.add_argument("--tune", default="off", choices=("on", "off"),
                       help="grid-search nsvm hyperparameters")
    p_inf.add_argument("--out", default=".", help="output directory")

    p_bench = sub.add_parser("bench", help="run a benchmark grid")
    p_bench.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    p_bench.add_argument("--runs", type=int, default=None, help="override config runs")
    p_bench.add_argument("--seed", type=int, default=None,
                         help="override config master_seed")
    p_bench.add_argument("--out", default=None, help="override config output_dir")
    p_bench.add_argument("--threads", type=int, default=None,
                         help="worker processes (default NETINFER_THREADS or 1)")

    p_eval = sub.add_parser("eval", help="score an estimate against a truth network")
    p_eval.add_argument("truth", help="truth adjacency CSV")
    p_eval.add_argument("estimate", help="estimated adjacency CSV")

    return parser


def _resolve_threads(flag_value: int | None) -> int:
    if flag_value is not None:
        return max(1, flag_value)
    env = os.environ.get("NETINFER_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ParseError(f"NETINFER_THREADS must be an integer, got {env!r}") from exc
    return 1


def _cmd_simulate(args) -> int:
    cfg = SimConfig.from_dict(load_json(args.config))
    if args.seed is not None:
        cfg = with_seed(cfg, args.seed)
    out = simulate(cfg)
    save_sim(args.out, out)
    print(f"wrote series.csv, truth.csv, meta.json to {args.out} "
          f"(mode={cfg.mode} p={cfg.p} n={cfg.n} edges={int(out.truth.adj.sum())})")
    return 0


def _cmd_infer(args) -> int:
    if args.method != "nsvm" and args.kernel is not None:
        raise ParseError(f"--kernel applies only to nsvm, not {args.method}")
    series = load_series_csv(args.series)
    if args.method == "nsvm":
        family = args.kernel if args.kernel is not None else "sigmoid"
        network = infer_nsvm(series, family, tune=(args.tune == "on")).network
    elif args.method == "rbn":
        network = learn_rbn(series).network
    else:
        network = infer_nlasso(series)
    os.makedirs(args.out, exist_ok=True)
    tsv = os.path.join(args.out, "network.tsv")
    csv_path = os.path.join(args.out, "network.csv")
    save_edges_tsv(tsv, network)
    save_adjacency_csv(csv_path, network)
    print(f"wrote {tsv} and {csv_path} "
          f"(p={network.n_variables} edges={int(network.adj.sum())})")
    return 0


def _cmd_bench(args) -> int:
    cfg_dict = load_json(args.config)
    if not isinstance(cfg_dict, dict):
        raise ParseError(f"{args.config}: benchmark config must be a JSON object")
    if args.runs is not None:
        cfg_dict["runs"] = args.runs
    if args.seed is not None:
        cfg_dict["master_seed"] = args.seed
    if args.out is not None:
        cfg_dict["output_dir"] = args.out
    config = ExperimentConfig.from_dict(cfg_dict)
    threads = _resolve_threads(args.threads)
    report = run_experiment(config, threads=threads)
    print(f"wrote {report.out_dir}/runs.csv, aggregate.csv, table.txt, "
          f"failures.log and {len(config.p_values)} figure(s); "
          f"{len(report.rows)} rows, {len(report.failures)} failures")
    if report.failed_methods:
        print(f"error: every run failed for: {', '.join(report.failed_methods)}",
              file=sys.stderr)
        return 1
    return 0


def _cmd_eval(args) -> int:
    truth = load_adjacency_csv(args.truth)
    estimate = load_adjacency_csv(args.estimate)
    r = rates(confusion(truth, estimate))
    print(f"tpr={r.tpr:g} fpr={r.fpr:g} tnr={r.tnr:g} fnr={r.fnr:g} mce={r.mce:g}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "infer": _cmd_infer,
    "bench": _cmd_bench,
    "eval": _cmd_eval,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NetinferError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
