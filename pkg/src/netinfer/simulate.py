"""Synthetic ground-truth dynamics for benchmarking.

Three generators share one random sparse coupling matrix A with
floor(p^2 * pi) nonzero entries (diagonal cells allowed):

  linear     X(t+1) = A X(t) + B + eps(t)
  nonlinear  X(t+1) = A f(X(t)) + eps(t),  f applies a per-variable
             transform drawn from {sin, cos, cbrt(x^2) - 2^sin(x)}
  mixture    as nonlinear but drawn from
             {sin, x/2, cbrt(x^2) - 2^sin(x), -0.8 x}

eps(t) ~ N(0, sigma^2) i.i.d., with sigma itself uniform on
sigma_range. The first timepoint is N(0, sigma^2), additionally mapped
through 2*sin(.) for the nonlinear and mixture modes. The ground-truth
network has an edge i -> j exactly where A[j, i] != 0 (the truth
adjacency is the support of A, transposed).

All draws come from numpy's default_rng(seed) in this fixed order:
edge positions, magnitudes, signs, then B (linear) or the per-variable
transform indices (nonlinear/mixture), sigma, the initial state, and
one noise vector per subsequent timepoint. The same config therefore
reproduces the same output byte for byte.

With ``stabilize`` (the default) A is rescaled to spectral radius 0.9
whenever it exceeds it, which leaves the truth network unchanged.
Without it, a rollout reaching non-finite values raises
ExplosiveSeriesError naming the first bad (1-based) timepoint.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .data import (
    Network,
    TimeSeries,
    load_adjacency_csv,
    load_json,
    load_series_csv,
    save_adjacency_csv,
    save_json,
    save_series_csv,
)
from .errors import ExplosiveSeriesError, InvalidInputError

MODES = ("linear", "nonlinear", "mixture")

SPECTRAL_RADIUS_CAP = 0.9


def _f_poly_exp(x):
    """cbrt(x^2) - 2^sin(x), the shared curved transform."""
    return np.cbrt(x * x) - np.exp2(np.sin(x))


NONLINEAR_TRANSFORMS = (
    ("sin", np.sin),
    ("cos", np.cos),
    ("cbrt_sq_minus_exp2_sin", _f_poly_exp),
)

MIXTURE_TRANSFORMS = (
    ("sin", np.sin),
    ("half", lambda x: 0.5 * x),
    ("cbrt_sq_minus_exp2_sin", _f_poly_exp),
    ("neg_scale", lambda x: -0.8 * x),
)


@dataclass(frozen=True)
class SimConfig:
    """Shape, distribution and seeding of one simulated system."""

    p: int
    n: int
    pi: float
    seed: int
    mode: str = "linear"
    coeff_range: tuple = (0.5, 1.0)
    sigma_range: tuple = (0.1, 0.5)
    stabilize: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInputError(f"unknown simulation mode {self.mode!r}")
        if self.p < 2:
            raise InvalidInputError(f"p must be >= 2, got {self.p}")
        if self.n < 3:
            raise InvalidInputError(f"need at least 3 timepoints, got {self.n}")
        if not (0.0 < self.pi < 1.0):
            raise InvalidInputError(f"pi must lie in (0, 1), got {self.pi}")
        for name, (lo, hi) in (("coeff_range", self.coeff_range),
                               ("sigma_range", self.sigma_range)):
            if not (np.isfinite(lo) and np.isfinite(hi) and 0.0 < lo <= hi):
                raise InvalidInputError(f"bad {name} {(lo, hi)}: need 0 < lo <= hi")

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "pi": self.pi,
            "seed": int(self.seed),
            "mode": self.mode,
            "coeff_range": list(self.coeff_range),
            "sigma_range": list(self.sigma_range),
            "stabilize": self.stabilize,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        return cls(
            p=int(d["p"]),
            n=int(d["n"]),
            pi=float(d["pi"]),
            seed=int(d.get("seed", 0)),
            mode=str(d.get("mode", "linear")),
            coeff_range=tuple(d.get("coeff_range", (0.5, 1.0))),
            sigma_range=tuple(d.get("sigma_range", (0.1, 0.5))),
            stabilize=bool(d.get("stabilize", True)),
        )


@dataclass(frozen=True)
class SimOutput:
    series: TimeSeries
    truth: Network
    A: np.ndarray
    B: np.ndarray | None  # linear mode only
    sigma: float
    transforms: tuple | None  # per-variable transform names, dynamics modes only
    config: SimConfig


def derive_seed(master_seed: int, p: int, run: int) -> int:
    """Independent per-cell seed for the (p, run) experiment grid."""
    ss = np.random.SeedSequence([int(master_seed), int(p), int(run)])
    return int(ss.generate_state(1, np.uint64)[0])


def _draw_coupling(rng: np.random.Generator, config: SimConfig) -> np.ndarray:
    """A with floor(p^2 * pi) signed entries at distinct cells."""
    p = config.p
    n_edges = int(np.floor(p * p * config.pi))
    A = np.zeros((p, p))
    positions = rng.choice(p * p, size=n_edges, replace=False)
    magnitudes = rng.uniform(config.coeff_range[0], config.coeff_range[1], size=n_edges)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n_edges)
    A.flat[positions] = magnitudes * signs
    return A


def _stabilize(A: np.ndarray) -> np.ndarray:
    radius = float(np.max(np.abs(np.linalg.eigvals(A))))
    if radius > SPECTRAL_RADIUS_CAP:
        return A * (SPECTRAL_RADIUS_CAP / radius)
    return A


def _check_finite(x: np.ndarray, timepoint: int, config: SimConfig) -> None:
    if not np.all(np.isfinite(x)):
        raise ExplosiveSeriesError(
            f"series left the finite range at timepoint {timepoint} "
            f"(p={config.p}, stabilize={config.stabilize})",
            timepoint=timepoint,
        )


def _simulate(config: SimConfig) -> SimOutput:
    mode = config.mode
    rng = np.random.default_rng(config.seed)
    A = _draw_coupling(rng, config)
    truth = Network((A != 0).T.astype(np.int8))
    p, n = config.p, config.n

    B = None
    transforms = None
    funcs = None
    if mode == "linear":
        B = rng.uniform(-1.0, 1.0, size=p)
    else:
        table = NONLINEAR_TRANSFORMS if mode == "nonlinear" else MIXTURE_TRANSFORMS
        tidx = rng.integers(0, len(table), size=p)
        transforms = tuple(table[i][0] for i in tidx)
        funcs = [table[i][1] for i in tidx]

    if config.stabilize:
        A = _stabilize(A)
    sigma = float(rng.uniform(config.sigma_range[0], config.sigma_range[1]))

    values = np.empty((n, p))
    with np.errstate(over="ignore", invalid="ignore"):
        x = rng.normal(0.0, sigma, size=p)
        if mode != "linear":
            x = 2.0 * np.sin(x)
        values[0] = x
        _check_finite(values[0], 1, config)
        for t in range(1, n):
            eps = rng.normal(0.0, sigma, size=p)
            if mode == "linear":
                x = A @ x + B + eps
            else:
                fx = np.empty(p)
                for v in range(p):
                    fx[v] = funcs[v](x[v])
                x = A @ fx + eps
            values[t] = x
            _check_finite(values[t], t + 1, config)

    return SimOutput(series=TimeSeries(values), truth=truth, A=A, B=B,
                     sigma=sigma, transforms=transforms, config=config)


def _expect_mode(config: SimConfig, mode: str) -> SimConfig:
    if config.mode != mode:
        raise InvalidInputError(f"config mode is {config.mode!r}, expected {mode!r}")
    return config


def simulate_linear(config: SimConfig) -> SimOutput:
    """First-order linear dynamics with a constant drift term."""
    return _simulate(_expect_mode(config, "linear"))


def simulate_nonlinear(config: SimConfig) -> SimOutput:
    """Dynamics driven through per-variable nonlinear transforms."""
    return _simulate(_expect_mode(config, "nonlinear"))


def simulate_mixture(config: SimConfig) -> SimOutput:
    """Dynamics mixing linear and nonlinear per-variable transforms."""
    return _simulate(_expect_mode(config, "mixture"))


def simulate(config: SimConfig) -> SimOutput:
    """Dispatch on config.mode."""
    return _simulate(config)


def with_seed(config: SimConfig, seed: int) -> SimConfig:
    return replace(config, seed=int(seed))


def save_sim(dirpath, out: SimOutput) -> None:
    """Write series.csv, truth.csv and meta.json into a directory."""
    os.makedirs(dirpath, exist_ok=True)
    save_series_csv(os.path.join(dirpath, "series.csv"), out.series)
    save_adjacency_csv(os.path.join(dirpath, "truth.csv"), out.truth)
    meta = {
        "sigma": out.sigma,
        "transforms": list(out.transforms) if out.transforms is not None else None,
        "config": out.config.to_dict(),
    }
    save_json(os.path.join(dirpath, "meta.json"), meta)


def load_sim(dirpath):
    """Read back (series, truth, meta) as written by save_sim."""
    series = load_series_csv(os.path.join(dirpath, "series.csv"))
    truth = load_adjacency_csv(os.path.join(dirpath, "truth.csv"))
    meta = load_json(os.path.join(dirpath, "meta.json"))
    return series, truth, meta
