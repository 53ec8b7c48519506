"""Dual solver correctness against an independent QP oracle."""

import numpy as np
import pytest
from conftest import kkt_violation, make_spec, qp_oracle, qp_polish

from netinfer.errors import ConvergenceError, InvalidInputError
from netinfer.kernels import FAMILIES, KernelSpec, gram_matrix
from netinfer.svr import (
    SvrParams,
    dual_objective,
    fit_svr,
    predict,
    predict_batch,
    weight_norm_sq,
)


@pytest.mark.parametrize("family", FAMILIES)
def test_constant_target_law(family, rng):
    # Every y within epsilon of a constant: zero duals, bias = constant.
    X = rng.normal(size=(8, 3))
    y = np.full(8, 4.2)
    spec = make_spec(family, 3, rng)
    model = fit_svr(X, y, spec, SvrParams(C=1.0, epsilon=0.1))
    assert np.max(np.abs(model.beta)) <= 1e-10
    assert model.bias == pytest.approx(4.2, abs=1e-10)
    assert predict(model, rng.normal(size=3)) == pytest.approx(4.2, abs=1e-10)


def test_constant_target_within_tube(rng):
    # Not exactly constant, but inside one epsilon band around its mean.
    X = rng.normal(size=(10, 2))
    y = 2.0 + rng.uniform(-0.05, 0.05, size=10)
    model = fit_svr(X, y, KernelSpec("rbf", kstar=0.5),
                    SvrParams(C=10.0, epsilon=0.2))
    assert np.max(np.abs(model.beta)) <= 1e-10
    # with all duals at zero the bias is pinned inside the feasible
    # bracket [max(y) - eps, min(y) + eps], which contains the mean
    assert y.max() - 0.2 <= model.bias <= y.min() + 0.2


def test_two_point_closed_form():
    # X = (-1, 1), y = (-1, 1), eps=0, C=10: w=1, b=0, beta=(-1/2, 1/2).
    X = np.array([[-1.0], [1.0]])
    y = np.array([-1.0, 1.0])
    model = fit_svr(X, y, KernelSpec("linear"),
                    SvrParams(C=10.0, epsilon=0.0, tol=1e-8))
    assert np.allclose(model.beta, [-0.5, 0.5], atol=1e-6)
    assert model.bias == pytest.approx(0.0, abs=1e-6)
    assert predict(model, np.array([0.5])) == pytest.approx(0.5, abs=1e-6)
    assert weight_norm_sq(model, [0]) == pytest.approx(1.0, abs=1e-6)


def test_dual_matches_qp_oracle_battery(rng):
    # Random small instances across all kernel families. Convex duals
    # (linear, rbf, poly with nonnegative constant) must match the
    # global QP optimum two-sided. The sigmoid dual can be indefinite,
    # where no exact QP oracle exists and a descent solver only
    # guarantees a local optimum: those fits must be KKT-stationary and
    # unimprovable by a local polish from the solver's own point.
    checked = 0
    for trial in range(15):
        n = int(rng.integers(4, 11))
        p = int(rng.integers(1, 5))
        X = rng.normal(size=(n, p))
        y = rng.normal(size=n)
        C = float(rng.choice([0.5, 2.0, 10.0, 50.0]))
        eps = float(rng.choice([0.01, 0.1, 0.3]))
        params = SvrParams(C=C, epsilon=eps)
        for family in FAMILIES:
            spec = make_spec(family, p, rng)
            model = fit_svr(X, y, spec, params)
            G = gram_matrix(spec, X)
            # feasibility
            assert abs(model.beta.sum()) <= 1e-8 * C
            assert np.max(np.abs(model.beta)) <= C + 1e-12
            # stationarity
            assert kkt_violation(G, y, model.beta, model.bias, C, eps) \
                <= params.tol + 1e-12
            ours = dual_objective(G, y, model.beta, eps)
            if family == "sigmoid":
                polished = qp_polish(G, y, C, eps, model.beta)
                assert ours - polished <= 1e-5 * (1.0 + abs(polished)), \
                    (trial, ours, polished)
            else:
                ref = qp_oracle(G, y, C, eps, starts=[model.beta])
                assert abs(ours - ref) <= 1e-5 * (1.0 + abs(ref)), \
                    (family, trial, ours, ref)
            checked += 1
    assert checked == 60


def test_indefinite_dual_reaches_a_local_optimum():
    # A strongly indefinite tanh Gram has several dual KKT points; the
    # solver lands on a genuine local optimum (zero KKT residual,
    # polish-stable) even when a different basin is lower.
    rng = np.random.default_rng(2)
    X = rng.normal(size=(8, 2))
    y = rng.normal(size=8)
    spec = KernelSpec("sigmoid", kstar=1.5)
    C, eps = 10.0, 0.05
    model = fit_svr(X, y, spec, SvrParams(C=C, epsilon=eps))
    G = gram_matrix(spec, X)
    assert kkt_violation(G, y, model.beta, model.bias, C, eps) <= 1e-3
    ours = dual_objective(G, y, model.beta, eps)
    polished = qp_polish(G, y, C, eps, model.beta)
    assert ours - polished <= 1e-5 * (1.0 + abs(polished))
    # multistart descent exposes a second, lower basin
    elsewhere = qp_oracle(G, y, C, eps)
    assert elsewhere < ours - 1.0


def test_zero_duals_stay_inside_tube(rng):
    X = rng.normal(size=(12, 2))
    y = np.sin(X[:, 0]) + 0.1 * rng.normal(size=12)
    params = SvrParams(C=5.0, epsilon=0.15)
    model = fit_svr(X, y, KernelSpec("rbf", kstar=1.0), params)
    pred = predict_batch(model, X)
    inside = np.abs(model.beta) <= 1e-9 * params.C
    assert np.all(np.abs(y[inside] - pred[inside])
                  <= params.epsilon + params.tol)


def test_loss_nonincreasing_in_C(rng):
    # A harder penalty on tube violations can only shrink the total
    # violation at the optimum.
    X = rng.normal(size=(15, 2))
    y = X[:, 0] - 0.5 * X[:, 1] + 0.3 * rng.normal(size=15)
    eps = 0.1
    losses = []
    for C in (0.1, 1.0, 10.0, 100.0):
        model = fit_svr(X, y, KernelSpec("linear"),
                        SvrParams(C=C, epsilon=eps, tol=1e-6))
        resid = np.abs(y - predict_batch(model, X))
        losses.append(float(np.sum(np.maximum(0.0, resid - eps))))
    for lo, hi in zip(losses[1:], losses[:-1]):
        assert lo <= hi + 1e-6


def test_weight_norm_identities(rng):
    X = rng.normal(size=(10, 4))
    y = rng.normal(size=10)
    model = fit_svr(X, y, KernelSpec("linear"), SvrParams(C=2.0, epsilon=0.05))
    w = model.beta @ X  # explicit primal weights for the linear kernel
    full = weight_norm_sq(model, range(4))
    assert full == pytest.approx(float(w @ w), rel=1e-10, abs=1e-12)
    for j in range(4):
        keep = [u for u in range(4) if u != j]
        assert weight_norm_sq(model, keep) == pytest.approx(
            float(w @ w - w[j] ** 2), rel=1e-10, abs=1e-12)


def test_weight_norm_input_errors(rng):
    X = rng.normal(size=(6, 2))
    model = fit_svr(X, rng.normal(size=6), KernelSpec("linear"), SvrParams())
    with pytest.raises(InvalidInputError):
        weight_norm_sq(model, [])
    with pytest.raises(InvalidInputError):
        weight_norm_sq(model, [2])
    with pytest.raises(InvalidInputError):
        weight_norm_sq(model, [-1])


def test_predict_batch_matches_predict(rng):
    X = rng.normal(size=(9, 3))
    y = rng.normal(size=9)
    model = fit_svr(X, y, KernelSpec("rbf", kstar=0.7),
                    SvrParams(C=3.0, epsilon=0.1))
    Z = rng.normal(size=(5, 3))
    batch = predict_batch(model, Z)
    for i in range(5):
        assert batch[i] == pytest.approx(predict(model, Z[i]), rel=1e-12,
                                         abs=1e-12)


def test_predict_input_errors(rng):
    X = rng.normal(size=(6, 3))
    model = fit_svr(X, rng.normal(size=6), KernelSpec("linear"), SvrParams())
    with pytest.raises(InvalidInputError):
        predict(model, np.array([1.0, 2.0]))
    with pytest.raises(InvalidInputError):
        predict(model, np.array([1.0, 2.0, np.nan]))


def test_fit_input_errors(rng):
    spec = KernelSpec("linear")
    with pytest.raises(InvalidInputError):
        fit_svr(np.array([[1.0, 2.0]]), np.array([1.0]), spec, SvrParams())
    with pytest.raises(InvalidInputError):
        fit_svr(rng.normal(size=(5, 2)), rng.normal(size=4), spec, SvrParams())
    with pytest.raises(InvalidInputError):
        fit_svr(np.array([[np.nan], [1.0]]), np.array([0.0, 1.0]), spec,
                SvrParams())


def test_params_validation():
    with pytest.raises(InvalidInputError):
        SvrParams(C=0.0)
    with pytest.raises(InvalidInputError):
        SvrParams(C=-3.0)
    with pytest.raises(InvalidInputError):
        SvrParams(epsilon=-0.1)
    with pytest.raises(InvalidInputError):
        SvrParams(tol=0.0)
    with pytest.raises(InvalidInputError):
        SvrParams(max_passes=0)
    assert SvrParams(epsilon=0.0).epsilon == 0.0


def test_convergence_error_carries_violation(rng):
    X = rng.normal(size=(12, 3))
    y = rng.normal(size=12)
    spec = KernelSpec("sigmoid", kstar=1.5)  # indefinite: pair updates only
    with pytest.raises(ConvergenceError) as info:
        fit_svr(X, y, spec, SvrParams(C=100.0, epsilon=0.001, max_passes=1))
    assert info.value.violation > 0.0
    assert "did not converge" in str(info.value)


def test_dual_objective_formula(rng):
    G = np.eye(3)
    y = np.array([1.0, -2.0, 0.5])
    beta = np.array([0.5, -0.5, 0.0])
    want = 0.5 * (0.25 + 0.25) - (0.5 + 1.0) + 0.1 * 1.0
    assert dual_objective(G, y, beta, 0.1) == pytest.approx(want, abs=1e-15)
