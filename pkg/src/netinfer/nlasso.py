"""Neighborhood selection with an L1-penalized linear model.

Per target, coordinate descent minimizes

    (1/m) ||y - X beta||^2 + lam * ||beta||_1

over a descending lambda path with warm starts; the reported
neighborhood is the support of the fit whose BIC is best, scanning
from the sparse (large-lambda) end. Edges run regressor -> target.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .data import Network, TimeSeries, build_lagged_pairs
from .errors import ComputationError, ConvergenceError, InvalidInputError

N_LAMBDAS = 50
LAMBDA_RATIO = 1e-3
CD_TOL = 1e-7
CD_MAX_SWEEPS = 10_000
MIN_VARIANCE = 1e-12


@dataclass(frozen=True)
class LassoFit:
    coef: np.ndarray
    intercept: float
    lam: float
    sweeps: int


def _soft_threshold(z: float, t: float) -> float:
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


@njit(cache=True)
def _cd_core(G2, c2, beta, lam, exclude, tol, max_sweeps):
    """Cyclic coordinate descent sweeps in covariance form.

    G2 = (2/m) X'X and c2 = (2/m) X'y, so each coordinate sees the same
    rho as the residual formulation without touching the m-row data.
    beta is updated in place; q = G2 beta is maintained incrementally.
    Returns (sweeps, last max change); sweeps is negated when the
    budget runs out without meeting tol.
    """
    p = beta.shape[0]
    q = G2 @ beta
    delta = 0.0
    for sweep in range(1, max_sweeps + 1):
        delta = 0.0
        for j in range(p):
            if j == exclude or G2[j, j] == 0.0:
                continue
            old = beta[j]
            rho = c2[j] - q[j] + G2[j, j] * old
            if rho > lam:
                new = (rho - lam) / G2[j, j]
            elif rho < -lam:
                new = (rho + lam) / G2[j, j]
            else:
                new = 0.0
            if new != old:
                d = new - old
                for k in range(p):
                    q[k] += G2[k, j] * d
                beta[j] = new
                if abs(d) > delta:
                    delta = abs(d)
        if delta <= tol:
            return sweep, delta
    return -max_sweeps, delta


def fit_lasso(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    exclude: int | None = None,
    beta0: np.ndarray | None = None,
    tol: float = CD_TOL,
    max_sweeps: int = CD_MAX_SWEEPS,
) -> LassoFit:
    """Cyclic coordinate descent at a single penalty level.

    Expects standardized (zero-mean) columns; y is centered internally
    and its mean reported as the intercept, which with zero-mean X is
    the exact joint optimum. ``exclude`` pins one coordinate at zero
    (used to forbid self-edges). Zero-norm columns (standardized
    constants) also stay at zero. Convergence is max coefficient change
    per sweep <= tol; running out of sweeps raises ConvergenceError
    carrying the last change.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    m, p = X.shape
    if lam < 0 or not np.isfinite(lam):
        raise InvalidInputError(f"lambda must be finite and >= 0, got {lam}")
    if exclude is not None and not (0 <= exclude < p):
        raise InvalidInputError(f"exclude index {exclude} outside 0..{p - 1}")
    intercept = float(y.mean())
    yc = y - intercept
    G2 = np.ascontiguousarray((2.0 / m) * (X.T @ X))
    c2 = (2.0 / m) * (X.T @ yc)
    beta = np.zeros(p) if beta0 is None else np.asarray(beta0, dtype=float).copy()
    if exclude is not None and beta[exclude] != 0.0:
        beta[exclude] = 0.0
    sweeps, delta = _cd_core(
        G2, c2, beta, float(lam), -1 if exclude is None else exclude, tol, max_sweeps
    )
    if sweeps > 0:
        return LassoFit(coef=beta, intercept=intercept, lam=float(lam), sweeps=sweeps)
    raise ConvergenceError(
        f"coordinate descent still moving after {max_sweeps} sweeps "
        f"(last max change {delta:.3e} > tol {tol:.1e})",
        violation=float(delta),
    )


def default_lambda_path(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Descending geometric path from the smallest all-zero penalty.

    lambda_max = max_j |2 x_j' y| / m sends every coordinate to zero;
    the path spans three decades below it. A zero lambda_max (y is
    orthogonal to every column) yields an empty path.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    m = X.shape[0]
    lam_max = float(np.max(np.abs(2.0 * (X.T @ y)))) / m if X.size else 0.0
    if lam_max <= 0.0:
        return np.empty(0)
    return np.geomspace(lam_max, LAMBDA_RATIO * lam_max, N_LAMBDAS)


def _bic(X: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
    m = y.shape[0]
    resid = y - X @ beta
    rss = float(resid @ resid)
    df = int(np.count_nonzero(beta))
    return m * np.log(max(rss / m, MIN_VARIANCE)) + df * np.log(m)


def infer_nlasso(series: TimeSeries, exclude_self: bool = False) -> Network:
    """Infer the network by per-target lasso paths with BIC selection.

    Scanning the path from large lambda, the first fit attaining the
    minimum BIC is kept, so BIC ties resolve toward the sparser model.
    A target whose path fails to converge is left empty with a warning;
    all targets failing is a ComputationError.
    """
    X, Y, _ = build_lagged_pairs(series)
    m, p = X.shape
    adj = np.zeros((p, p), dtype=np.int8)
    G2 = np.ascontiguousarray((2.0 / m) * (X.T @ X))
    n_failed = 0
    for j in range(p):
        y = Y[:, j]
        exclude = j if exclude_self else -1
        lams = default_lambda_path(X, y)
        if lams.size == 0:
            continue
        c2 = (2.0 / m) * (X.T @ (y - y.mean()))
        best_bic = np.inf
        best_coef = np.zeros(p)
        beta = np.zeros(p)
        failed = None
        for lam in lams:
            sweeps, delta = _cd_core(G2, c2, beta, float(lam), exclude, CD_TOL, CD_MAX_SWEEPS)
            if sweeps <= 0:
                failed = ConvergenceError(
                    f"coordinate descent still moving after {CD_MAX_SWEEPS} sweeps "
                    f"(last max change {delta:.3e} > tol {CD_TOL:.1e})",
                    violation=float(delta),
                )
                break
            bic = _bic(X, y, beta)
            if bic < best_bic:
                best_bic = bic
                best_coef = beta.copy()
        if failed is not None:
            n_failed += 1
            warnings.warn(
                f"target {j}: lasso path failed ({failed}); leaving its column empty",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        for f in np.nonzero(best_coef)[0]:
            adj[f, j] = 1
    if p > 0 and n_failed == p:
        raise ComputationError("lasso inference failed for every target variable")
    return Network(adj)
