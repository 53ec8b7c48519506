"""Neighborhood SVR network inference.

For each target variable, fit an epsilon-SVR of its next-step value on
all current-step variables, rank the regressors by weight-norm drop,
pick the prefix with the best LOOCV error, and keep it only if it beats
the intercept-only predictor. The union of kept neighborhoods, oriented
regressor -> target, is the inferred network.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .data import Network, TimeSeries, build_lagged_pairs
from .errors import ComputationError, ConvergenceError, InvalidInputError
from .feature_select import (
    intercept_loocv_error,
    prefix_loocv_errors,
    rank_features,
    select_kopt,
)
from .kernels import FAMILIES, KernelSpec, default_spec, gram_matrix
from .svr import SvrParams, _fit_gram, _psd_spec


@dataclass(frozen=True)
class TuningGrid:
    """Candidate hyperparameter values, searched in sorted order."""

    kstars: tuple = tuple(10.0**e for e in range(-6, 0))
    Cs: tuple = tuple(10.0**e for e in range(1, 7))
    degrees: tuple = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class TuningResult:
    spec: KernelSpec
    params: SvrParams
    mse: float


@dataclass(frozen=True)
class TargetInfo:
    """Per-target diagnostics from one inference run."""

    target: int
    selected: tuple
    kopt: int
    spec: KernelSpec | None
    loocv_error: float
    baseline_error: float
    failed: bool = False
    message: str = ""


@dataclass(frozen=True)
class InferenceResult:
    network: Network
    targets: tuple = field(default_factory=tuple)


def _loocv_mse(X: np.ndarray, y: np.ndarray, spec: KernelSpec, params: SvrParams) -> float:
    """Full-feature LOOCV MSE; +inf if any fold fails to converge."""
    n = X.shape[0]
    G = gram_matrix(spec, X)
    psd = _psd_spec(spec)
    idx = np.arange(n)
    total = 0.0
    prev = None
    for i in range(n):
        keep = idx[idx != i]
        try:
            beta, bias = _fit_gram(G[np.ix_(keep, keep)], y[keep], params,
                                   beta0=prev, psd=psd)
        except ConvergenceError:
            return np.inf
        prev = beta
        total += (y[i] - (beta @ G[keep, i] + bias)) ** 2
    return total / n


def tune_hyperparameters(
    X: np.ndarray,
    y: np.ndarray,
    family: str,
    grid: TuningGrid | None = None,
    base_params: SvrParams | None = None,
    constant: float | None = None,
) -> TuningResult:
    """Grid-search kernel scale, box constraint, and polynomial degree.

    The default operating point (the family's default kernel at the
    base C) is evaluated first and a grid candidate replaces it only on
    a strict LOOCV improvement, so ties resolve toward the default and
    then toward smaller C, smaller kstar, smaller degree (the search
    order). The linear kernel has no scale or degree, so only C is
    searched.
    """
    if family not in FAMILIES:
        raise InvalidInputError(f"unknown kernel family {family!r}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    grid = grid if grid is not None else TuningGrid()
    base = base_params if base_params is not None else SvrParams()
    p = X.shape[1]

    def make(kstar, degree):
        return KernelSpec(family, kstar=kstar, degree=degree, constant=constant)

    candidates: list[tuple[KernelSpec, SvrParams]] = []
    default = default_spec(family, p, constant=constant)
    candidates.append((default, base))
    degrees = sorted(grid.degrees) if family == "poly" else [1]
    for C in sorted(grid.Cs):
        params_c = SvrParams(C=C, epsilon=base.epsilon, tol=base.tol,
                             max_passes=base.max_passes)
        if family == "linear":
            candidates.append((default, params_c))
        else:
            for kstar in sorted(grid.kstars):
                for d in degrees:
                    candidates.append((make(kstar, d), params_c))

    best: TuningResult | None = None
    for spec, params in candidates:
        mse = _loocv_mse(X, y, spec, params)
        if best is None or mse < best.mse:
            best = TuningResult(spec=spec, params=params, mse=mse)
    if not np.isfinite(best.mse):
        raise ComputationError("no hyperparameter candidate produced a finite LOOCV error")
    return best


def infer_nsvm(
    series: TimeSeries,
    family: str,
    params: SvrParams | None = None,
    tune: bool = False,
    grid: TuningGrid | None = None,
    constant: float | None = None,
    max_prefix: int | None = None,
) -> InferenceResult:
    """Infer a directed network with per-target neighborhood SVR.

    Targets whose standardized response never leaves the epsilon tube
    (constant columns in particular) get an empty neighborhood: the
    zero model already fits them. A target whose pipeline fails is
    logged with a warning and left empty; if every target fails the run
    is a ComputationError.
    """
    if family not in FAMILIES:
        raise InvalidInputError(f"unknown kernel family {family!r}")
    params = params if params is not None else SvrParams()
    X, Y, _ = build_lagged_pairs(series)
    n, p = X.shape
    adj = np.zeros((p, p), dtype=np.int8)
    infos = []
    n_failed = 0
    for j in range(p):
        y = Y[:, j]
        if y.max() - y.min() <= 2.0 * params.epsilon:
            # the flat model covers the whole response within the tube
            infos.append(TargetInfo(target=j, selected=(), kopt=0, spec=None,
                                    loocv_error=np.inf,
                                    baseline_error=intercept_loocv_error(y)))
            continue
        try:
            if tune:
                tuned = tune_hyperparameters(X, y, family, grid=grid,
                                             base_params=params, constant=constant)
                spec, tparams = tuned.spec, tuned.params
            else:
                spec, tparams = default_spec(family, p, constant=constant), params
            ranking = rank_features(X, y, spec, tparams)
            errors = prefix_loocv_errors(X, y, ranking.order, spec, tparams,
                                         max_prefix=max_prefix)
            kopt = select_kopt(errors)
            best_err = float(errors[kopt - 1])
            baseline = intercept_loocv_error(y)
            if best_err < baseline:
                selected = tuple(int(f) for f in ranking.order[:kopt])
            else:
                selected = ()
                kopt = 0
            for f in selected:
                adj[f, j] = 1
            infos.append(TargetInfo(target=j, selected=selected, kopt=kopt,
                                    spec=spec, loocv_error=best_err,
                                    baseline_error=baseline))
        except (ConvergenceError, ComputationError) as exc:
            n_failed += 1
            warnings.warn(
                f"target {j}: inference failed ({exc}); leaving its column empty",
                RuntimeWarning,
                stacklevel=2,
            )
            infos.append(TargetInfo(target=j, selected=(), kopt=0, spec=None,
                                    loocv_error=np.inf, baseline_error=np.inf,
                                    failed=True, message=str(exc)))
    if p > 0 and n_failed == p:
        raise ComputationError("inference failed for every target variable")
    return InferenceResult(network=Network(adj), targets=tuple(infos))
