"""Kernel-space feature ranking and prefix cross-validation.

Features are ranked by how much the squared weight norm of a fitted SVR
drops when the feature is removed with the dual coefficients held fixed
(the recursive-feature-elimination criterion). Candidate neighborhoods
are then the prefixes of that ranking; each prefix is scored by
leave-one-out cross-validation with the model refit on every fold, and
the smallest prefix attaining the minimum error wins.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ComputationError, ConvergenceError, InvalidInputError
from .kernels import KernelSpec, gram_matrix
from .svr import (SvrModel, SvrParams, _fit_gram, _psd_spec, fit_svr,
                  weight_norm_sq)


@dataclass(frozen=True)
class Ranking:
    """Features sorted most-informative first.

    order[r] is the feature index at rank r; scores are the norm drops
    aligned with feature index (not rank).
    """

    order: np.ndarray
    scores: np.ndarray


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of prefix LOOCV over a ranking."""

    order: np.ndarray
    errors: np.ndarray  # errors[k-1] = LOOCV MSE of the size-k prefix
    kopt: int
    selected: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "selected", self.order[: self.kopt].copy())


def rank_features(
    X: np.ndarray,
    y: np.ndarray,
    kernel: KernelSpec,
    params: SvrParams,
) -> Ranking:
    """Rank by score_j = ||w||^2(all) - ||w||^2(all minus j), beta frozen.

    Fits one SVR on all features and scores each by the drop in squared
    weight norm when its column is removed with the dual coefficients
    held fixed. For a linear kernel this reduces to w_j^2. Ties break
    toward the smaller feature index. With a single feature the score
    is the full squared norm (removing it leaves nothing).
    """
    model = fit_svr(X, y, kernel, params)
    return rank_model(model)


def rank_model(model: SvrModel) -> Ranking:
    """Ranking of an already-fitted model (see rank_features)."""
    p = model.train_x.shape[1]
    full = weight_norm_sq(model, range(p))
    scores = np.empty(p)
    if p == 1:
        scores[0] = full
    else:
        for j in range(p):
            rest = [u for u in range(p) if u != j]
            scores[j] = full - weight_norm_sq(model, rest)
    order = np.lexsort((np.arange(p), -scores))
    return Ranking(order=order.astype(int), scores=scores)


def prefix_loocv_errors(
    X: np.ndarray,
    y: np.ndarray,
    order: np.ndarray,
    kernel: KernelSpec,
    params: SvrParams,
    max_prefix: int | None = None,
) -> np.ndarray:
    """LOOCV mean squared error for each ranking prefix.

    Entry k-1 scores the prefix of size k, k = 1..K where K is the full
    ranking length or ``max_prefix`` if given. Every fold refits the
    model from scratch (n fits per prefix, n*K total). A fold that fails
    to converge poisons its prefix with +inf and a warning; if every
    prefix is poisoned the caller has nothing to select from and a
    ComputationError is raised.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    order = np.asarray(order, dtype=int)
    K = order.size if max_prefix is None else min(order.size, int(max_prefix))
    if K < 1:
        raise InvalidInputError("need at least one prefix to score")
    idx = np.arange(n)
    errors = np.empty(K)
    # Consecutive folds share all but one sample, and consecutive prefixes
    # share the whole fold: the previous solution is feasible as-is for the
    # next problem (box and sum-to-zero are index-free), so warm-start each
    # fit from its neighbor. Results are identical up to solver tolerance
    # but the solver converges in far fewer pair updates.
    psd = _psd_spec(kernel)
    first_fold = None
    for k in range(1, K + 1):
        cols = order[:k]
        G = gram_matrix(kernel, X[:, cols])
        total = 0.0
        failed = False
        prev = first_fold
        for i in range(n):
            keep = idx[idx != i]
            sub = G[np.ix_(keep, keep)]
            try:
                beta, bias = _fit_gram(sub, y[keep], params, beta0=prev, psd=psd)
            except ConvergenceError as exc:
                warnings.warn(
                    f"prefix {k}: LOOCV fold {i} did not converge "
                    f"(violation {exc.violation:.3e}); scoring prefix as +inf",
                    RuntimeWarning,
                    stacklevel=2,
                )
                failed = True
                break
            prev = beta
            if i == 0:
                first_fold = beta
            pred = beta @ G[keep, i] + bias
            total += (y[i] - pred) ** 2
        errors[k - 1] = np.inf if failed else total / n
    if not np.any(np.isfinite(errors)):
        raise ComputationError(
            "every ranking prefix failed LOOCV; no neighborhood size is selectable"
        )
    return errors


def select_kopt(errors: np.ndarray) -> int:
    """Smallest prefix size attaining the minimum LOOCV error.

    Infinite entries are never selected; an all-infinite vector is an
    error rather than an arbitrary pick.
    """
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise InvalidInputError("empty error vector")
    if not np.any(np.isfinite(errors)):
        raise ComputationError("all prefix errors are infinite")
    return int(np.argmin(errors)) + 1


def intercept_loocv_error(y: np.ndarray) -> float:
    """LOOCV MSE of the intercept-only predictor mean(y without i).

    Closed form: the fold error is (n * (y_i - mean(y)) / (n - 1))^2.
    Used as the bar an inferred neighborhood must beat to keep any
    regressors at all.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 2:
        raise InvalidInputError("need at least 2 observations")
    r = n * (y - y.mean()) / (n - 1)
    return float(np.mean(r**2))
