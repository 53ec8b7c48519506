"""Epsilon-insensitive support vector regression.

Solves the dual problem

    min_beta  0.5 * beta' G beta - beta' y + epsilon * ||beta||_1
    s.t.      sum(beta) = 0,   -C <= beta_i <= C

where ``beta_i`` is the signed dual coefficient of training point i and
G is the kernel Gram matrix. PSD kernels use an active-set solver that
pivots points between the tube interior, the tube edges, and the linear
loss zones; indefinite kernels (sigmoid) and any leftover cases use
sequential minimal optimization over beta pairs with second-order
working-set selection. The prediction is

    f(x) = sum_i beta_i K(x_i, x) + b.

Inputs are expected to be standardized by the caller (zero mean, unit
variance per column, constant columns mapped to zeros); this module
never rescales.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidInputError
from .kernels import KernelSpec, cross_kernel, gram_matrix

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dep, but stay importable
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@dataclass(frozen=True)
class SvrParams:
    """Solver hyperparameters.

    ``max_passes`` is the cap on SMO pair updates; None means 10 * n * 1000,
    resolved at fit time.
    """

    C: float = 1.0
    epsilon: float = 0.1
    tol: float = 1e-3
    max_passes: int | None = None

    def __post_init__(self):
        if not np.isfinite(self.C) or self.C <= 0:
            raise InvalidInputError(f"C must be positive, got {self.C}")
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise InvalidInputError(f"epsilon must be >= 0, got {self.epsilon}")
        if not np.isfinite(self.tol) or self.tol <= 0:
            raise InvalidInputError(f"tol must be positive, got {self.tol}")
        if self.max_passes is not None and self.max_passes < 1:
            raise InvalidInputError("max_passes must be a positive integer")

    def to_dict(self) -> dict:
        return {"C": float(self.C), "epsilon": float(self.epsilon), "tol": float(self.tol)}

    @classmethod
    def from_dict(cls, d: dict) -> "SvrParams":
        return cls(
            C=float(d.get("C", 1.0)),
            epsilon=float(d.get("epsilon", 0.1)),
            tol=float(d.get("tol", 1e-3)),
            max_passes=d.get("max_passes"),
        )


@dataclass
class SvrModel:
    """Fitted model: signed duals, bias, kernel and retained training inputs."""

    beta: np.ndarray
    bias: float
    kernel: KernelSpec
    train_x: np.ndarray
    params: SvrParams


@njit(cache=True)
def _smo_core(G, y, C, eps, tol, max_iter, beta0):
    """Pairwise coordinate SMO on the signed dual coefficients.

    Maintains E = y - G @ beta. The bias multiplier is bracketed by

        b_low  = max over i with beta_i < C of  E_i - eps (beta_i >= 0)
                                                E_i + eps (beta_i < 0)
        b_high = min over j with beta_j > -C of E_j - eps (beta_j > 0)
                                                E_j + eps (beta_j <= 0)

    and the KKT conditions hold iff b_low - b_high <= tol. Each step
    takes i at the b_low extreme and pairs it with the j whose
    unconstrained update yields the largest objective gain
    (second-order working-set selection), then moves beta_i up and
    beta_j down, clipped at the box and at the kink beta = 0.

    ``beta0`` is the starting point and must satisfy the box and
    sum-to-zero constraints (all-zeros is always valid; a neighboring
    fold's solution makes a good warm start).

    Returns (beta, E, b_low, b_high, iterations, converged).
    """
    n = y.shape[0]
    beta = beta0.copy()
    E = y - G @ beta
    b_low = 0.0
    b_high = 0.0
    it = 0
    converged = False
    snap = 1e-12 * C
    while it <= max_iter:
        # refresh E occasionally against drift from incremental updates
        if it > 0 and it % 4096 == 0:
            E = y - G @ beta
        b_low = -np.inf
        b_high = np.inf
        i = -1
        for u in range(n):
            bu = beta[u]
            if bu < C:
                g = E[u] + eps if bu < 0.0 else E[u] - eps
                if g > b_low:
                    b_low = g
                    i = u
            if bu > -C:
                g = E[u] - eps if bu > 0.0 else E[u] + eps
                if g < b_high:
                    b_high = g
        if b_low - b_high <= tol:
            converged = True
            break
        if it == max_iter:
            break
        # pick j by gain = diff^2 / denom over the violating down-moves;
        # the b_high attainer always qualifies, so j is never -1 here
        j = -1
        best_gain = -1.0
        best_diff = 0.0
        best_denom = 1.0
        Gii = G[i, i]
        for u in range(n):
            bu = beta[u]
            if bu > -C and u != i:
                g = E[u] - eps if bu > 0.0 else E[u] + eps
                diff = b_low - g
                if diff > 0.0:
                    denom = Gii + G[u, u] - 2.0 * G[i, u]
                    if denom < 1e-12:
                        denom = 1e-12
                    gain = diff * diff / denom
                    if gain > best_gain:
                        best_gain = gain
                        best_diff = diff
                        best_denom = denom
                        j = u
        cap_i = -beta[i] if beta[i] < 0.0 else C - beta[i]
        cap_j = beta[j] if beta[j] > 0.0 else C + beta[j]
        lam = best_diff / best_denom
        if lam > cap_i:
            lam = cap_i
        if lam > cap_j:
            lam = cap_j
        beta[i] += lam
        beta[j] -= lam
        # snap bound hits blurred by rounding; a coefficient stranded an
        # ulp below the box would cap future steps at ~0 and stall
        if C - beta[i] < snap:
            beta[i] = C
        if beta[j] + C < snap:
            beta[j] = -C
        for u in range(n):
            E[u] -= lam * (G[u, i] - G[u, j])
        it += 1
    return beta, E, b_low, b_high, it, converged


@njit(cache=True)
def _active_set_core(G, y, C, eps, tol, max_pivots, beta0):
    """Active-set solver for the dual when the Gram matrix is PSD.

    Each training point is in one of five states: inside the tube
    (beta 0), pinned to the upper/lower tube edge (beta strictly inside
    the box, residual exactly +/-eps), or in the upper/lower linear loss
    zone (beta at +/-C). The states fix an affine face of the feasible
    box; the dual optimum over that face solves a small linear system.
    The iterate walks toward the face optimum, stopping only where an
    edge coefficient hits the box or the kink at zero (that coordinate
    changes state and the walk re-solves). On arriving at a face optimum
    it prices the off-face points and admits the one whose tube
    violation is worst; when none is profitable the point is optimal.
    Admitting only at face optima is what makes the pivoting finite:
    inserting a violator mid-walk can bounce straight back out at the
    same degenerate vertex.

    This reaches machine-precision KKT points in O(n) pivots where pair
    updates need thousands of passes, and its cost does not grow with C.
    Returns the same tuple as _smo_core with pivots in place of
    iterations; a non-converged return (budget, dense edge set, or a
    degenerate zero-step cycle) leaves a feasible beta that pair updates
    can resume from.
    """
    n = y.shape[0]
    beta = beta0.copy()
    state = np.zeros(n, np.int8)  # 0 in, 1 up-edge, 2 up-lin, 3 lo-edge, 4 lo-lin
    for u in range(n):
        bu = beta[u]
        if bu >= C * (1.0 - 1e-9):
            state[u] = 2
            beta[u] = C
        elif bu <= -C * (1.0 - 1e-9):
            state[u] = 4
            beta[u] = -C
        elif bu > 1e-9 * C:
            state[u] = 1
        elif bu < -1e-9 * C:
            state[u] = 3
        else:
            state[u] = 0
            beta[u] = 0.0
    f = G @ beta
    b_lo = -np.inf
    b_hi = np.inf
    for u in range(n):
        e = y[u] - f[u]
        bu = beta[u]
        if bu < C:
            g = e + eps if bu < 0.0 else e - eps
            if g > b_lo:
                b_lo = g
        if bu > -C:
            g = e - eps if bu > 0.0 else e + eps
            if g < b_hi:
                b_hi = g
    b = 0.5 * (b_lo + b_hi) if (b_lo > -np.inf and b_hi < np.inf) else 0.0
    pivots = 0
    zero_run = 0
    last_gap = np.inf
    converged = False
    while pivots <= max_pivots:
        ns = 0
        for u in range(n):
            if state[u] == 1 or state[u] == 3:
                ns += 1
        if ns > 200:
            break
        gf = np.zeros(n)
        S = np.empty(ns, np.int64)
        sol = np.empty(ns + 1)
        if ns == 0:
            b_lo = -np.inf
            b_hi = np.inf
            for u in range(n):
                e = y[u] - f[u]
                bu = beta[u]
                if bu < C:
                    g = e + eps if bu < 0.0 else e - eps
                    if g > b_lo:
                        b_lo = g
                if bu > -C:
                    g = e - eps if bu > 0.0 else e + eps
                    if g < b_hi:
                        b_hi = g
            bstar = 0.5 * (b_lo + b_hi)
        else:
            v = 0
            for u in range(n):
                if state[u] == 1 or state[u] == 3:
                    S[v] = u
                    v += 1
            # solve for the step from the current point, not for beta
            # outright: the ridge bias then scales with the step length
            # and vanishes as the face optimum is approached, so large
            # C does not smear the edge residuals off +/-eps
            A = np.zeros((ns + 1, ns + 1))
            rhs = np.zeros(ns + 1)
            bsum = 0.0
            for u in range(n):
                bsum += beta[u]
            for a in range(ns):
                ia = S[a]
                for c in range(ns):
                    A[a, c] = G[ia, S[c]]
                A[a, a] += 1e-8
                A[a, ns] = 1.0
                A[ns, a] = 1.0
                sgn = 1.0 if state[ia] == 1 else -1.0
                rhs[a] = y[ia] - eps * sgn - f[ia]
            rhs[ns] = -bsum
            step = np.linalg.solve(A, rhs)
            bstar = step[ns]
            for a in range(ns):
                da = step[a]
                sol[a] = beta[S[a]] + da
                if da != 0.0:
                    ia = S[a]
                    for u in range(n):
                        gf[u] += G[u, ia] * da
        db = bstar - b
        theta = 1.0
        who = -1
        newstate = -1
        # kink crossings below noise level are rounding artifacts of a
        # pinned face (the solve step is ~0), not real exits
        xi = 1e-11 * C
        if ns > 0:
            for a in range(ns):
                ia = S[a]
                b1a = sol[a]
                b0a = beta[ia]
                if state[ia] == 1:
                    if b1a > C:
                        t = (C - b0a) / (b1a - b0a)
                        if t < 0.0:
                            t = 0.0
                        if t < theta:
                            theta = t
                            who = ia
                            newstate = 2
                    elif b1a < -xi:
                        t = (0.0 - b0a) / (b1a - b0a)
                        if t < 0.0:
                            t = 0.0
                        if t < theta:
                            theta = t
                            who = ia
                            newstate = 0
                else:
                    if b1a < -C:
                        t = (-C - b0a) / (b1a - b0a)
                        if t < 0.0:
                            t = 0.0
                        if t < theta:
                            theta = t
                            who = ia
                            newstate = 4
                    elif b1a > xi:
                        t = (0.0 - b0a) / (b1a - b0a)
                        if t < 0.0:
                            t = 0.0
                        if t < theta:
                            theta = t
                            who = ia
                            newstate = 0
        if who < 0:
            # reached the optimum of the current face; commit it, then
            # price the off-face points for a profitable entry
            for a in range(ns):
                ia = S[a]
                bu = sol[a]
                if state[ia] == 1:
                    bu = min(max(bu, 0.0), C)
                else:
                    bu = min(max(bu, -C), 0.0)
                beta[ia] = bu
            b = bstar
            for u in range(n):
                f[u] += gf[u]
            # profitable entries come in two flavors: coefficients that
            # want to grow (point above the tube, or pinned at -C with
            # the residual back inside) and ones that want to shrink
            exc_up = 0.25 * tol
            exc_dn = 0.25 * tol
            who_up = -1
            who_dn = -1
            st_up = -1
            st_dn = -1
            for u in range(n):
                st = state[u]
                if st == 1 or st == 3:
                    continue
                r0 = y[u] - f[u] - b
                if st == 0:
                    if r0 - eps > exc_up:
                        exc_up = r0 - eps
                        who_up = u
                        st_up = 1
                    elif -eps - r0 > exc_dn:
                        exc_dn = -eps - r0
                        who_dn = u
                        st_dn = 3
                elif st == 2:
                    if eps - r0 > exc_dn:
                        exc_dn = eps - r0
                        who_dn = u
                        st_dn = 1
                else:
                    if r0 + eps > exc_up:
                        exc_up = r0 + eps
                        who_up = u
                        st_up = 3
            if ns == 0:
                # an empty edge set pins every coefficient through the
                # zero-sum constraint, so a lone entry cannot move:
                # admit the best up/down pair together
                if who_up >= 0 and who_dn >= 0:
                    state[who_up] = st_up
                    state[who_dn] = st_dn
                    last_gap = np.inf
                    pivots += 1
                    continue
                who = -1
            elif exc_up >= exc_dn and who_up >= 0:
                who = who_up
                newstate = st_up
            elif who_dn >= 0:
                who = who_dn
                newstate = st_dn
            else:
                who = who_up
                newstate = st_up
            if who < 0:
                # no profitable entry; done once the KKT gap clears tol,
                # else the ridge damped this step and another round on
                # the same face tightens it (stop if that stalls)
                g_lo = -np.inf
                g_hi = np.inf
                for u in range(n):
                    e = y[u] - f[u]
                    bu = beta[u]
                    if bu < C:
                        g = e + eps if bu < 0.0 else e - eps
                        if g > g_lo:
                            g_lo = g
                    if bu > -C:
                        g = e - eps if bu > 0.0 else e + eps
                        if g < g_hi:
                            g_hi = g
                gap = g_lo - g_hi
                if gap <= tol or gap >= 0.9 * last_gap:
                    converged = gap <= tol
                    break
                last_gap = gap
                pivots += 1
                continue
            state[who] = newstate
            last_gap = np.inf
            pivots += 1
            if pivots % 32 == 0:
                f = G @ beta
            continue
        if theta > 0.0:
            for a in range(ns):
                ia = S[a]
                bu = beta[ia] + theta * (sol[a] - beta[ia])
                # rounding must not leave an edge coefficient outside its
                # side of the box, else later exit ratios divide by zero
                if state[ia] == 1:
                    bu = min(max(bu, 0.0), C)
                else:
                    bu = min(max(bu, -C), 0.0)
                beta[ia] = bu
            b += theta * db
            for u in range(n):
                f[u] += theta * gf[u]
            zero_run = 0
        else:
            # a long run of zero-length pivots means a degenerate vertex
            # is being cycled; give up and let pair updates move past it
            zero_run += 1
            if zero_run > n // 2 + 8:
                break
        state[who] = newstate
        last_gap = np.inf
        if newstate == 0:
            beta[who] = 0.0
        elif newstate == 2:
            beta[who] = C
        elif newstate == 4:
            beta[who] = -C
        pivots += 1
        if pivots % 32 == 0:
            f = G @ beta
    E = y - G @ beta
    b_lo = -np.inf
    b_hi = np.inf
    for u in range(n):
        bu = beta[u]
        if bu < C:
            g = E[u] + eps if bu < 0.0 else E[u] - eps
            if g > b_lo:
                b_lo = g
        if bu > -C:
            g = E[u] - eps if bu > 0.0 else E[u] + eps
            if g < b_hi:
                b_hi = g
    if converged and not (b_lo - b_hi <= tol):
        converged = False
    return beta, E, b_lo, b_hi, pivots, converged


def _resolve_max_iter(params: SvrParams, n: int) -> int:
    if params.max_passes is not None:
        return int(params.max_passes)
    return 10 * n * 1000


def _psd_spec(kernel: KernelSpec) -> bool:
    """Whether the kernel's Gram matrices are positive semidefinite.

    Linear and RBF always are; polynomial is for a nonnegative additive
    constant; sigmoid (tanh) is indefinite in general.
    """
    if kernel.family in ("linear", "rbf"):
        return True
    if kernel.family == "poly":
        return kernel.constant is None or kernel.constant >= 0.0
    return False


def _fit_gram(G: np.ndarray, y: np.ndarray, params: SvrParams, beta0=None,
              psd: bool = False):
    """Solve the dual given a precomputed Gram matrix.

    ``beta0`` optionally warm-starts the solver; it must already satisfy
    the box and sum-to-zero constraints (pair updates preserve the sum,
    so an infeasible start would stay infeasible). With ``psd=True`` the
    active-set solver runs first and pair updates only finish off the
    rare case it abandons; indefinite kernels go straight to pair
    updates.

    Returns (beta, bias). Raises ConvergenceError carrying the final KKT
    violation when the update budget is exhausted.
    """
    n = y.shape[0]
    max_iter = _resolve_max_iter(params, n)
    if beta0 is None:
        beta0 = np.zeros(n)
    Gc = np.ascontiguousarray(G)
    yc = np.ascontiguousarray(y, dtype=float)
    b0 = np.ascontiguousarray(beta0, dtype=float)
    C, eps, tol = float(params.C), float(params.epsilon), float(params.tol)
    converged = False
    if psd:
        beta, E, b_low, b_high, it, converged = _active_set_core(
            Gc, yc, C, eps, tol, 100 * n + 200, b0)
        if not converged:
            b0 = np.ascontiguousarray(beta)
    if not converged:
        # indefinite kernel, or the rare degenerate face the active-set
        # solver abandoned: pair updates grind it out
        beta, E, b_low, b_high, it, converged = _smo_core(
            Gc, yc, C, eps, tol, max_iter, b0)
    if not converged:
        raise ConvergenceError(
            f"SMO did not converge after {it} pair updates "
            f"(KKT violation {b_low - b_high:.3e} > tol {params.tol:.1e})",
            violation=float(b_low - b_high),
        )
    E = y - G @ beta  # exact residuals for the bias, not the drifted ones
    C = params.C
    unbounded = (np.abs(beta) > 1e-9 * C) & (np.abs(beta) < (1.0 - 1e-9) * C)
    if np.any(unbounded):
        est = np.where(beta > 0, E - params.epsilon, E + params.epsilon)
        bias = float(np.mean(est[unbounded]))
    else:
        bias = float(0.5 * (b_low + b_high))
    return beta, bias


def fit_svr(X, y, kernel: KernelSpec, params: SvrParams) -> SvrModel:
    """Fit an epsilon-SVR on standardized data.

    X is n x p, y length n; the caller owns standardization. Raises
    InvalidInputError for n < 2 or non-finite input and ConvergenceError
    when the solver stalls (possible for the indefinite sigmoid kernel).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise InvalidInputError(
            f"X must be n x p and y length n, got {X.shape} and {y.shape}"
        )
    if X.shape[0] < 2:
        raise InvalidInputError(f"need at least 2 samples, got {X.shape[0]}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise InvalidInputError("X and y must be finite")
    G = gram_matrix(kernel, X)
    beta, bias = _fit_gram(G, y, params, psd=_psd_spec(kernel))
    return SvrModel(beta=beta, bias=bias, kernel=kernel, train_x=X.copy(), params=params)


def predict(model: SvrModel, x) -> float:
    """f(x) = sum_i beta_i K(x_i, x) + b for a single input vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.train_x.shape[1]:
        raise InvalidInputError(
            f"x must have {model.train_x.shape[1]} entries, got shape {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("x contains non-finite entries")
    k = cross_kernel(model.kernel, model.train_x, x[None, :])[:, 0]
    return float(model.beta @ k + model.bias)


def predict_batch(model: SvrModel, X) -> np.ndarray:
    """Vectorized ``predict`` over the rows of X."""
    X = np.asarray(X, dtype=float)
    K = cross_kernel(model.kernel, X, model.train_x)
    return K @ model.beta + model.bias


def weight_norm_sq(model: SvrModel, active_features) -> float:
    """Squared weight norm with the kernel restricted to a feature subset.

    Computes beta' K_S beta where K_S is the Gram matrix of the training
    inputs restricted to ``active_features`` and beta is held fixed. With
    all features this is ||w||^2.
    """
    idx = np.asarray(list(active_features), dtype=int)
    p = model.train_x.shape[1]
    if idx.size == 0:
        raise InvalidInputError("active_features must be nonempty")
    if np.any(idx < 0) or np.any(idx >= p):
        raise InvalidInputError(f"feature indices must lie in 0..{p - 1}")
    G = gram_matrix(model.kernel, model.train_x[:, idx])
    return float(model.beta @ G @ model.beta)


def dual_objective(G: np.ndarray, y: np.ndarray, beta: np.ndarray, epsilon: float) -> float:
    """Value of the minimized dual at ``beta``."""
    return float(
        0.5 * beta @ G @ beta - beta @ y + epsilon * np.sum(np.abs(beta))
    )
