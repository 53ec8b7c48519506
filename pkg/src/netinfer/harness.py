"""Benchmark experiment runner.

Simulates systems over a (p, run) grid, applies every requested
inference method to the same simulated data within a run (paired
comparison), and writes:

  runs.csv        one row per method per successful run
  aggregate.csv   mean and sample sd per method and p
  table.txt       human-readable comparison including published
                  reference results (labeled, not computed)
  figure_p<P>.svg one scatter per p, methods as points in (TNR, TPR)
  failures.log    one line per missing row

Per-run seeds derive from (master_seed, p, run) only, so results are
independent of the worker count and arrive byte-identical no matter
how the pool schedules them. Rows are sorted by (method, p, run) and
all floats are written as %.6f.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import TimeSeries
from .errors import InvalidInputError, NetinferError, ParseError
from .metrics import Aggregate, Rates, aggregate, confusion, rates
from .nlasso import infer_nlasso
from .nsvm import infer_nsvm
from .rbn import learn_rbn
from .reference import PUBLISHED_LABEL, published_rates
from .simulate import MODES, SimConfig, SimOutput, derive_seed, simulate
from .svr import SvrParams

ALL_METHODS = ("nsvm-L", "nsvm-R", "nsvm-S", "nsvm-P", "rbn", "nlasso")

METHOD_KERNELS = {
    "nsvm-L": "linear",
    "nsvm-R": "rbf",
    "nsvm-S": "sigmoid",
    "nsvm-P": "poly",
}

RUNS_HEADER = "method,kernel,p,n,pi,run,tpr,fpr,tnr,fnr,mce"
AGG_HEADER = (
    "method,kernel,p,n,pi,runs,tpr_mean,tpr_sd,fpr_mean,fpr_sd,"
    "tnr_mean,tnr_sd,fnr_mean,fnr_sd,mce_mean,mce_sd"
)

_CONFIG_KEYS = {
    "mode", "p_values", "n", "pi", "runs", "master_seed", "methods",
    "tuning", "svr", "coeff_range", "sigma_range", "stabilize",
    "kernel_constants", "exclude_self", "max_prefix", "output_dir",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a benchmark run depends on, JSON-round-trippable."""

    mode: str
    p_values: tuple
    n: int
    pi: float
    runs: int
    master_seed: int
    methods: tuple
    tuning: str = "default"  # "default" = fixed operating point, "grid" = search
    svr: SvrParams = SvrParams()
    coeff_range: tuple = (0.5, 1.0)
    sigma_range: tuple = (0.1, 0.5)
    stabilize: bool = True
    kernel_constants: tuple = ()  # ((family, value), ...)
    exclude_self: bool = False
    max_prefix: int | None = None
    output_dir: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParseError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not self.p_values:
            raise ParseError("p_values must be nonempty")
        if self.runs < 1:
            raise ParseError(f"runs must be >= 1, got {self.runs}")
        if not self.methods:
            raise ParseError("methods must be nonempty")
        for m in self.methods:
            if m not in ALL_METHODS:
                raise ParseError(f"unknown method {m!r}; expected one of {ALL_METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ParseError("methods must not repeat")
        if self.tuning not in ("default", "grid"):
            raise ParseError(f"tuning must be 'default' or 'grid', got {self.tuning!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        unknown = set(d) - _CONFIG_KEYS
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        try:
            p_values = d["p_values"]
            if isinstance(p_values, int):
                p_values = [p_values]
            return cls(
                mode=str(d["mode"]),
                p_values=tuple(int(p) for p in p_values),
                n=int(d["n"]),
                pi=float(d["pi"]),
                runs=int(d.get("runs", 1)),
                master_seed=int(d.get("master_seed", 0)),
                methods=tuple(d.get("methods", ALL_METHODS)),
                tuning=str(d.get("tuning", "default")),
                svr=SvrParams.from_dict(d.get("svr", {})),
                coeff_range=tuple(d.get("coeff_range", (0.5, 1.0))),
                sigma_range=tuple(d.get("sigma_range", (0.1, 0.5))),
                stabilize=bool(d.get("stabilize", True)),
                kernel_constants=tuple(sorted(
                    (str(k), float(v))
                    for k, v in d.get("kernel_constants", {}).items()
                )),
                exclude_self=bool(d.get("exclude_self", False)),
                max_prefix=None if d.get("max_prefix") is None else int(d["max_prefix"]),
                output_dir=d.get("output_dir"),
            )
        except KeyError as exc:
            raise ParseError(f"config is missing required key {exc.args[0]!r}") from exc
        except (TypeError, ValueError, InvalidInputError) as exc:
            raise ParseError(f"bad config value: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "p_values": list(self.p_values),
            "n": self.n,
            "pi": self.pi,
            "runs": self.runs,
            "master_seed": self.master_seed,
            "methods": list(self.methods),
            "tuning": self.tuning,
            "svr": self.svr.to_dict(),
            "coeff_range": list(self.coeff_range),
            "sigma_range": list(self.sigma_range),
            "stabilize": self.stabilize,
            "kernel_constants": {k: v for k, v in self.kernel_constants},
            "exclude_self": self.exclude_self,
            "max_prefix": self.max_prefix,
            "output_dir": self.output_dir,
        }

    def sim_config(self, p: int, run: int) -> SimConfig:
        return SimConfig(
            p=p, n=self.n, pi=self.pi,
            seed=derive_seed(self.master_seed, p, run),
            mode=self.mode, coeff_range=self.coeff_range,
            sigma_range=self.sigma_range, stabilize=self.stabilize,
        )


@dataclass(frozen=True)
class RunRow:
    method: str
    p: int
    run: int
    rates: Rates

    def sort_key(self):
        return (self.method, self.p, self.run)


@dataclass(frozen=True)
class Failure:
    method: str
    p: int
    run: int
    message: str

    def sort_key(self):
        return (self.method, self.p, self.run)


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    out_dir: str
    rows: tuple
    aggregates: tuple  # ((method, p, Aggregate | None), ...)
    failures: tuple
    failed_methods: tuple  # methods with zero successful rows anywhere


def infer_with_method(method: str, series: TimeSeries, config: ExperimentConfig):
    """Run one inference method with the experiment's settings."""
    if method in METHOD_KERNELS:
        family = METHOD_KERNELS[method]
        constants = dict(config.kernel_constants)
        return infer_nsvm(
            series, family, params=config.svr,
            tune=(config.tuning == "grid"),
            constant=constants.get(family),
            max_prefix=config.max_prefix,
        ).network
    if method == "rbn":
        return learn_rbn(series).network
    if method == "nlasso":
        return infer_nlasso(series, exclude_self=config.exclude_self)
    raise InvalidInputError(f"unknown method {method!r}")


def _run_cell(config_dict: dict, p: int, run: int):
    """Worker: simulate one (p, run) cell and score every method on it."""
    config = ExperimentConfig.from_dict(config_dict)
    rows: list[RunRow] = []
    failures: list[Failure] = []
    try:
        sim: SimOutput = simulate(config.sim_config(p, run))
    except NetinferError as exc:
        msg = f"simulation failed: {exc}"
        return rows, [Failure(m, p, run, msg) for m in config.methods]
    for method in config.methods:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # failures land in failures.log
                net = infer_with_method(method, sim.series, config)
            rows.append(RunRow(method, p, run, rates(confusion(sim.truth, net))))
        except NetinferError as exc:
            failures.append(Failure(method, p, run, str(exc)))
    return rows, failures


def _f(x: float) -> str:
    return "%.6f" % x


def _write_runs_csv(path, config, rows):
    with open(path, "w") as fh:
        fh.write(RUNS_HEADER + "\n")
        for r in rows:
            kernel = METHOD_KERNELS.get(r.method, "-")
            vals = r.rates
            fh.write(
                f"{r.method},{kernel},{r.p},{config.n},{_f(config.pi)},{r.run},"
                f"{_f(vals.tpr)},{_f(vals.fpr)},{_f(vals.tnr)},{_f(vals.fnr)},{_f(vals.mce)}\n"
            )


def compute_aggregates(config: ExperimentConfig, rows):
    """Per (method, p) in canonical order; None when no run succeeded."""
    by_cell = {}
    for r in rows:
        by_cell.setdefault((r.method, r.p), []).append(r.rates)
    out = []
    for method in sorted(config.methods):
        for p in config.p_values:
            cell = by_cell.get((method, p))
            out.append((method, p, aggregate(cell) if cell else None))
    return tuple(out)


def _write_aggregate_csv(path, config, aggregates):
    with open(path, "w") as fh:
        fh.write(AGG_HEADER + "\n")
        for method, p, agg in aggregates:
            kernel = METHOD_KERNELS.get(method, "-")
            if agg is None:
                stats = ",".join(["nan"] * 10)
                count = 0
            else:
                m, s = agg.mean, agg.sd
                stats = ",".join(
                    _f(v) for pair in zip(m.as_array(), s.as_array()) for v in pair
                )
                count = agg.count
            fh.write(f"{method},{kernel},{p},{config.n},{_f(config.pi)},{count},{stats}\n")


def _write_failures_log(path, failures):
    with open(path, "w") as fh:
        for f in failures:
            fh.write(f"method={f.method} p={f.p} run={f.run}: {f.message}\n")


def _write_table(path, config, aggregates):
    cols = ("TPR", "FPR", "TNR", "FNR", "MCE")
    with open(path, "w") as fh:
        for p in config.p_values:
            fh.write(f"=== mode={config.mode} p={p} n={config.n} "
                     f"pi={config.pi:g} runs={config.runs} ===\n")
            fh.write("%-10s" % "method" + "".join("%8s" % c for c in cols) + "\n")
            for method, ap, agg in aggregates:
                if ap != p:
                    continue
                if agg is None:
                    fh.write("%-10s" % method + "   (all runs failed)\n")
                    continue
                vals = agg.mean.as_array()
                fh.write("%-10s" % method + "".join("%8.2f" % v for v in vals) + "\n")
            ref = published_rates(config.mode, p)
            if ref:
                fh.write(f"-- reference ({PUBLISHED_LABEL}) --\n")
                for name in sorted(ref):
                    vals = ref[name].as_array()
                    fh.write("%-10s" % name + "".join("%8.2f" % v for v in vals) + "\n")
            fh.write("\n")


def figure_points(aggregates, p: int):
    """(method, tnr_mean, tpr_mean) per computed method at this p.

    The scatter renderer plots exactly these values, so they can be
    checked against the aggregate CSV without parsing SVG.
    """
    pts = []
    for method, ap, agg in aggregates:
        if ap == p and agg is not None:
            pts.append((method, agg.mean.tnr, agg.mean.tpr))
    return pts


def _write_figure(path, config, aggregates, p: int):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "netinfer"
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    for method, tnr, tpr in figure_points(aggregates, p):
        ax.plot([tnr], [tpr], "o", markersize=6)
        ax.annotate(method, (tnr, tpr), textcoords="offset points",
                    xytext=(5, 3), fontsize=8)
    for name, ref in sorted(published_rates(config.mode, p).items()):
        ax.plot([ref.tnr], [ref.tpr], "x", markersize=6, color="gray")
        ax.annotate(f"{name}*", (ref.tnr, ref.tpr), textcoords="offset points",
                    xytext=(5, 3), fontsize=8, color="gray")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.set_xlabel("TNR")
    ax.set_ylabel("TPR")
    ax.set_title(f"mode={config.mode} p={p} n={config.n} "
                 f"(* = {PUBLISHED_LABEL})", fontsize=9)
    ax.grid(True, linewidth=0.3, alpha=0.5)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | None = None,
    threads: int = 1,
) -> ExperimentReport:
    """Execute the full benchmark grid and write all report files.

    ``threads`` sizes the worker pool over (p, run) cells; any value
    produces identical outputs because each cell's seed is derived from
    (master_seed, p, run) alone and rows are canonically re-sorted.
    """
    out_dir = out_dir if out_dir is not None else config.output_dir
    if not out_dir:
        raise InvalidInputError("an output directory is required")
    os.makedirs(out_dir, exist_ok=True)
    threads = max(1, int(threads))
    cells = [(p, run) for p in config.p_values for run in range(1, config.runs + 1)]
    cfg_dict = config.to_dict()

    rows: list[RunRow] = []
    failures: list[Failure] = []
    if threads == 1:
        results = [_run_cell(cfg_dict, p, run) for p, run in cells]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_cell, cfg_dict, p, run) for p, run in cells]
            results = [f.result() for f in futures]
    for cell_rows, cell_failures in results:
        rows.extend(cell_rows)
        failures.extend(cell_failures)
    rows.sort(key=RunRow.sort_key)
    failures.sort(key=Failure.sort_key)

    aggregates = compute_aggregates(config, rows)
    _write_runs_csv(os.path.join(out_dir, "runs.csv"), config, rows)
    _write_aggregate_csv(os.path.join(out_dir, "aggregate.csv"), config, aggregates)
    _write_failures_log(os.path.join(out_dir, "failures.log"), failures)
    _write_table(os.path.join(out_dir, "table.txt"), config, aggregates)
    for p in config.p_values:
        _write_figure(os.path.join(out_dir, f"figure_p{p}.svg"), config, aggregates, p)

    succeeded = {r.method for r in rows}
    failed_methods = tuple(m for m in config.methods if m not in succeeded)
    return ExperimentReport(
        config=config, out_dir=out_dir, rows=tuple(rows),
        aggregates=aggregates, failures=tuple(failures),
        failed_methods=failed_methods,
    )
