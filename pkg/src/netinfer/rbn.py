"""Score-based structure learning restricted to one-step-lag parents.

Every variable at time t+1 gets its own parent set among the variables
at time t, so the graph over timepoints is acyclic by construction and
the network score decomposes per target. Each local model is Gaussian
linear regression scored by penalized log-likelihood (BIC); parents are
chosen by greedy hill climbing with single-parent additions and
removals.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .data import Network, TimeSeries, build_lagged_pairs
from .errors import DegenerateDesignError, InvalidInputError

logger = logging.getLogger(__name__)

MIN_VARIANCE = 1e-12


@dataclass(frozen=True)
class LocalModel:
    """Fitted local regression for one target."""

    target: int
    parents: tuple
    coef: np.ndarray  # intercept first, then one weight per parent
    sigma2: float
    bic: float


@dataclass(frozen=True)
class RbnResult:
    network: Network
    models: tuple


def bic_local(X: np.ndarray, y: np.ndarray, parents, n_extra_params: int = 0) -> LocalModel:
    """Score a parent set: Gaussian log-likelihood minus (L/2) log m.

    L counts the free parameters: one weight per parent, the intercept,
    and the noise variance, plus ``n_extra_params`` for callers whose
    score must account for parameters held elsewhere. The variance is
    the MLE RSS/m clamped below at 1e-12 (a perfect fit would otherwise
    send the likelihood to infinity); clamping is rare enough to warn
    about. A design matrix without full column rank cannot be scored
    and raises DegenerateDesignError.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    parents = tuple(int(f) for f in parents)
    m = y.shape[0]
    design = np.hstack([np.ones((m, 1)), X[:, list(parents)]])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise DegenerateDesignError(
            f"design for parents {parents} is rank deficient ({rank} < {design.shape[1]})"
        )
    resid = y - design @ coef
    rss = float(resid @ resid)
    sigma2 = rss / m
    if sigma2 < MIN_VARIANCE:
        warnings.warn(
            f"residual variance {sigma2:.3e} clamped to {MIN_VARIANCE:.0e} "
            f"for parents {parents}",
            RuntimeWarning,
            stacklevel=2,
        )
        sigma2 = MIN_VARIANCE
    loglik = -0.5 * m * np.log(2.0 * np.pi * sigma2) - rss / (2.0 * sigma2)
    L = len(parents) + 2 + n_extra_params
    bic = loglik - 0.5 * L * np.log(m)
    return LocalModel(target=-1, parents=parents, coef=coef, sigma2=sigma2, bic=float(bic))


def _greedy_parents(X: np.ndarray, y: np.ndarray, target: int, cap: int) -> LocalModel:
    """Hill-climb the parent set of one target by BIC."""
    p = X.shape[1]
    current = bic_local(X, y, ())
    parents: list[int] = []
    while True:
        best_move = None  # (model, new_parents)
        # removals first: on equal gain a smaller model wins
        for f in parents:
            trial = [u for u in parents if u != f]
            cand = bic_local(X, y, trial)
            if cand.bic > current.bic and (
                best_move is None or cand.bic > best_move[0].bic
            ):
                best_move = (cand, trial)
        if len(parents) < cap:
            for f in range(p):
                if f in parents:
                    continue
                trial = parents + [f]
                try:
                    cand = bic_local(X, y, trial)
                except DegenerateDesignError:
                    continue
                if cand.bic > current.bic and (
                    best_move is None or cand.bic > best_move[0].bic
                ):
                    best_move = (cand, trial)
        if best_move is None:
            break
        current, parents = best_move[0], sorted(best_move[1])
        logger.debug("target %d: move to parents %s (bic %.4f)", target, parents, current.bic)
    return LocalModel(target=target, parents=tuple(parents), coef=current.coef,
                      sigma2=current.sigma2, bic=current.bic)


def learn_rbn(series: TimeSeries, max_parents: int | None = None) -> RbnResult:
    """Learn the lag-one network by per-target greedy BIC search.

    The parent count is capped at min(p, m - 3) so every scored model
    keeps at least one residual degree of freedom; fewer than four
    lagged rows leave no admissible model at all.
    """
    X, Y, _ = build_lagged_pairs(series)
    m, p = X.shape
    cap = min(p, m - 3)
    if max_parents is not None:
        cap = min(cap, int(max_parents))
    if m - 3 < 1:
        raise InvalidInputError(
            f"need at least 5 timepoints (m - 3 >= 1 lagged rows), got m = {m}"
        )
    adj = np.zeros((p, p), dtype=np.int8)
    models = []
    for j in range(p):
        model = _greedy_parents(X, Y[:, j], j, cap)
        for f in model.parents:
            adj[f, j] = 1
        models.append(model)
    return RbnResult(network=Network(adj), models=tuple(models))
