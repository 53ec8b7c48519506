"""Kernel evaluation, Gram construction, and spec validation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netinfer.errors import InvalidInputError
from netinfer.kernels import (
    FAMILIES,
    KernelSpec,
    cross_kernel,
    default_spec,
    eval_kernel,
    gram_matrix,
    with_constant,
)


def make_psd_spec(family, rng):
    kstar = float(rng.uniform(0.05, 2.0))
    if family == "poly":
        return KernelSpec("poly", kstar=kstar, degree=int(rng.integers(1, 6)),
                          constant=float(rng.uniform(0.0, 2.0)))
    return KernelSpec(family, kstar=kstar)


def test_linear_is_dot_product():
    spec = KernelSpec("linear")
    assert eval_kernel(spec, np.array([1.0, 2.0]), np.array([3.0, 4.0])) == 11.0


def test_rbf_same_point_is_one():
    spec = KernelSpec("rbf", kstar=0.5)
    x = np.array([0.3, -1.2, 4.0])
    assert eval_kernel(spec, x, x) == 1.0


def test_rbf_known_value():
    spec = KernelSpec("rbf", kstar=0.25)
    x = np.array([1.0, 0.0])
    z = np.array([0.0, 1.0])
    assert eval_kernel(spec, x, z) == pytest.approx(np.exp(-0.5), rel=1e-14)


def test_poly_known_value():
    spec = KernelSpec("poly", kstar=1.0, degree=2, constant=1.0)
    x = np.array([1.0, 0.0])
    assert eval_kernel(spec, x, x) == pytest.approx(4.0, abs=1e-14)


def test_poly_default_constant_is_one():
    spec = KernelSpec("poly", kstar=1.0, degree=2)
    assert spec.constant == 1.0
    x = np.array([1.0, 0.0])
    assert eval_kernel(spec, x, x) == pytest.approx(4.0, abs=1e-14)


def test_sigmoid_default_constant_is_zero():
    spec = KernelSpec("sigmoid", kstar=0.7)
    assert spec.constant == 0.0
    x = np.array([0.5, 0.5])
    z = np.array([1.0, -1.0])
    assert eval_kernel(spec, x, z) == pytest.approx(np.tanh(0.7 * (x @ z)),
                                                    rel=1e-14)
    shifted = with_constant(spec, 0.3)
    assert eval_kernel(shifted, x, z) == pytest.approx(
        np.tanh(0.7 * (x @ z) + 0.3), rel=1e-14)


def test_with_constant_none_keeps_spec():
    spec = KernelSpec("sigmoid", kstar=0.7)
    assert with_constant(spec, None) is spec


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(0, 2 ** 31 - 1))
def test_symmetry(family, seed):
    rng = np.random.default_rng(seed)
    spec = default_spec(family, p=4)
    x = rng.normal(size=4)
    z = rng.normal(size=4)
    assert eval_kernel(spec, x, z) == eval_kernel(spec, z, x)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_rbf_bounds(seed):
    rng = np.random.default_rng(seed)
    spec = KernelSpec("rbf", kstar=float(rng.uniform(0.01, 3.0)))
    x = rng.normal(size=3)
    z = rng.normal(size=3)
    v = eval_kernel(spec, x, z)
    assert 0.0 < v <= 1.0
    if np.linalg.norm(x - z) > 1e-6:
        assert v < 1.0


@pytest.mark.parametrize("family", ["linear", "rbf", "poly"])
def test_gram_is_positive_semidefinite(family):
    rng = np.random.default_rng(99)
    for _ in range(10):
        X = rng.normal(size=(8, 4))
        spec = make_psd_spec(family, rng)
        G = gram_matrix(spec, X)
        assert np.array_equal(G, G.T)
        eigs = np.linalg.eigvalsh(G)
        assert eigs.min() >= -1e-8


def test_gram_matches_pairwise_eval():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(5, 3))
    for family in FAMILIES:
        spec = make_psd_spec(family, rng)
        G = gram_matrix(spec, X)
        for i in range(5):
            for j in range(5):
                assert G[i, j] == pytest.approx(eval_kernel(spec, X[i], X[j]),
                                                rel=1e-12, abs=1e-12)


def test_gram_single_row():
    spec = KernelSpec("rbf", kstar=1.0)
    G = gram_matrix(spec, np.array([[1.0, 2.0]]))
    assert G.shape == (1, 1)
    assert G[0, 0] == 1.0


def test_gram_identity_rows():
    spec = KernelSpec("linear")
    G = gram_matrix(spec, np.eye(2))
    assert np.array_equal(G, np.eye(2))


def test_cross_kernel_matches_pairwise():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(4, 3))
    Z = rng.normal(size=(2, 3))
    spec = KernelSpec("rbf", kstar=0.8)
    K = cross_kernel(spec, X, Z)
    assert K.shape == (4, 2)
    for i in range(4):
        for j in range(2):
            assert K[i, j] == pytest.approx(eval_kernel(spec, X[i], Z[j]),
                                            rel=1e-12)


def test_non_finite_rejected():
    spec = KernelSpec("linear")
    with pytest.raises(InvalidInputError):
        gram_matrix(spec, np.array([[np.nan, 1.0]]))
    with pytest.raises(InvalidInputError):
        eval_kernel(spec, np.array([np.inf]), np.array([1.0]))


def test_dimension_mismatch_rejected():
    spec = KernelSpec("linear")
    with pytest.raises(InvalidInputError):
        eval_kernel(spec, np.array([1.0, 2.0]), np.array([1.0]))
    with pytest.raises(InvalidInputError):
        cross_kernel(spec, np.ones((2, 3)), np.ones((2, 2)))


def test_spec_validation():
    with pytest.raises(InvalidInputError):
        KernelSpec("rbf", kstar=0.0)
    with pytest.raises(InvalidInputError):
        KernelSpec("rbf", kstar=-1.0)
    with pytest.raises(InvalidInputError):
        KernelSpec("poly", kstar=1.0, degree=0)
    with pytest.raises(InvalidInputError):
        KernelSpec("poly", kstar=1.0, degree=6)
    with pytest.raises(InvalidInputError):
        KernelSpec("sigmoid", kstar=1.0, constant=np.nan)
    with pytest.raises(InvalidInputError):
        KernelSpec("mystery", kstar=1.0)


def test_default_spec_values():
    for family in FAMILIES:
        spec = default_spec(family, p=50)
        assert spec.kstar == pytest.approx(1.0 / 50)
        assert spec.degree == (3 if family == "poly" else 1)
    with pytest.raises(InvalidInputError):
        default_spec("rbf", p=0)


def test_dict_round_trip():
    rng = np.random.default_rng(17)
    for family in FAMILIES:
        spec = make_psd_spec(family, rng)
        d = spec.to_dict()
        assert d["const"] == spec.constant
        assert KernelSpec.from_dict(d) == spec
