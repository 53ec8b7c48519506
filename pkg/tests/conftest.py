"""Shared test fixtures and independent reference implementations.

The oracles here deliberately avoid the package's own solver paths:
the QP oracle runs scipy's SLSQP on the split (alpha, alpha*) dual,
the LOOCV reference refits from scratch through the public API only,
and the KKT checker classifies points straight from the definition.

For the sigmoid family the dual can be indefinite, so no exact QP
oracle exists (convex QP solvers reject or localize); those instances
are certified by the KKT check plus ``qp_polish`` (a local descent
started at the solver's own point must not improve it).
"""

import numpy as np
import pytest
from scipy.optimize import minimize

from netinfer.kernels import KernelSpec, gram_matrix
from netinfer.svr import dual_objective


def make_spec(family, p, rng):
    """A random valid KernelSpec of the given family.

    Sigmoid kstar is drawn from the range the package actually uses
    (the tuning-grid decades and the 1/p default).
    """
    if family == "poly":
        return KernelSpec("poly", kstar=float(rng.uniform(0.05, 2.0)),
                          degree=int(rng.integers(1, 4)), constant=1.0)
    if family == "sigmoid":
        kstar = float(rng.choice([1e-4, 1e-3, 1e-2, 1e-1, 1.0 / p]))
        return KernelSpec("sigmoid", kstar=kstar, constant=0.0)
    return KernelSpec(family, kstar=float(rng.uniform(0.05, 2.0)))


def _slsqp(G, y, C, epsilon, z0):
    """One SLSQP solve of the split dual from start z0 (length 2n)."""
    n = y.shape[0]

    def fun(z):
        beta = z[:n] - z[n:]
        return 0.5 * beta @ G @ beta - beta @ y + epsilon * np.sum(z)

    def jac(z):
        g = G @ (z[:n] - z[n:]) - y
        return np.concatenate([g + epsilon, -g + epsilon])

    cons = [{"type": "eq",
             "fun": lambda z: np.sum(z[:n]) - np.sum(z[n:]),
             "jac": lambda z: np.concatenate([np.ones(n), -np.ones(n)])}]
    res = minimize(fun, z0, jac=jac, bounds=[(0.0, C)] * (2 * n),
                   constraints=cons, method="SLSQP",
                   options={"maxiter": 500, "ftol": 1e-14})
    return float(res.fun)


def _split(beta):
    return np.concatenate([np.maximum(beta, 0.0), np.maximum(-beta, 0.0)])


def qp_oracle(G, y, C, epsilon, starts=()):
    """Best dual objective over multiple SLSQP starts.

    Exact (up to solver tolerance) for convex instances; for indefinite
    ones it returns the best local minimum found, which lower-bounds
    nothing but is still useful as a sanity reference.
    """
    n = y.shape[0]
    rng = np.random.default_rng(1234)
    start_list = [np.zeros(2 * n), rng.uniform(0.0, min(C, 1.0), size=2 * n)]
    start_list.extend(_split(np.asarray(b, dtype=float)) for b in starts)
    return min(_slsqp(G, y, C, epsilon, z0) for z0 in start_list)


def qp_polish(G, y, C, epsilon, beta):
    """Objective after local descent started at ``beta`` itself."""
    return _slsqp(G, y, C, epsilon, _split(np.asarray(beta, dtype=float)))


def kkt_violation(G, y, beta, bias, C, epsilon):
    """Worst per-point violation of the epsilon-SVR KKT conditions.

    With g_i = y_i - (G beta)_i - bias the conditions are
      beta_i = 0        ->  |g_i| <= epsilon
      0 < beta_i < C    ->  g_i = epsilon     (mirrored for negative)
      beta_i = +-C      ->  g_i beyond the tube on its side
    and the returned value is how far the worst point strays.
    """
    g = y - G @ beta - bias
    edge = 1e-9 * C
    worst = 0.0
    for i in range(y.shape[0]):
        b = beta[i]
        if abs(b) <= edge:
            v = abs(g[i]) - epsilon
        elif b >= C - edge:
            v = epsilon - g[i]
        elif b <= -C + edge:
            v = g[i] + epsilon
        elif b > 0:
            v = abs(g[i] - epsilon)
        else:
            v = abs(g[i] + epsilon)
        worst = max(worst, v)
    return worst


def loocv_reference(X, y, cols, kernel, params):
    """Plain-restart LOOCV MSE of an SVR on the given feature columns."""
    from netinfer.svr import fit_svr, predict

    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    total = 0.0
    for i in range(n):
        keep = [u for u in range(n) if u != i]
        model = fit_svr(X[np.ix_(keep, list(cols))], y[keep], kernel, params)
        total += (y[i] - predict(model, X[i, list(cols)])) ** 2
    return total / n


def objective_of(G, y, beta, epsilon):
    return dual_objective(np.asarray(G), np.asarray(y), np.asarray(beta),
                          float(epsilon))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
