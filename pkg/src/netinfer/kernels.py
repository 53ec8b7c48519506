"""Kernel evaluation and Gram-matrix construction.

Four kernel families are supported:

    linear   K(x, y) = <x, y>
    poly     K(x, y) = (kstar * <x, y> + const)^degree
    rbf      K(x, y) = exp(-kstar * ||x - y||^2)
    sigmoid  K(x, y) = tanh(kstar * <x, y> + const)

``kstar`` is the kernel parameter, ``degree`` applies to the polynomial
family only, and ``const`` is the offset of the polynomial/sigmoid
families (fixed defaults 1.0 and 0.0 respectively, overridable).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError

FAMILIES = ("linear", "rbf", "sigmoid", "poly")

# Fixed offsets per family; deterministic stand-ins for an otherwise free
# constant, overridable through KernelSpec / the harness config.
DEFAULT_CONSTANTS = {"poly": 1.0, "sigmoid": 0.0}

MAX_POLY_DEGREE = 5


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus parameters.

    The linear family ignores ``kstar``, ``degree`` and ``constant``.
    ``constant`` defaults to 1.0 for poly and 0.0 for sigmoid.
    """

    family: str
    kstar: float = 1.0
    degree: int = 1
    constant: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(
                f"unknown kernel family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.constant is None:
            object.__setattr__(
                self, "constant", DEFAULT_CONSTANTS.get(self.family, 0.0)
            )
        if self.family != "linear":
            if not np.isfinite(self.kstar) or self.kstar <= 0:
                raise InvalidInputError(f"kstar must be positive, got {self.kstar}")
            if not np.isfinite(self.constant):
                raise InvalidInputError("kernel constant must be finite")
        if self.family == "poly" and not (1 <= int(self.degree) <= MAX_POLY_DEGREE):
            raise InvalidInputError(
                f"poly degree must be in 1..{MAX_POLY_DEGREE}, got {self.degree}"
            )

    def to_dict(self) -> dict:
        """JSON-config form: {"family", "kstar", "degree", "const"}."""
        return {
            "family": self.family,
            "kstar": float(self.kstar),
            "degree": int(self.degree),
            "const": float(self.constant),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(
            family=d["family"],
            kstar=float(d.get("kstar", 1.0)),
            degree=int(d.get("degree", 1)),
            constant=float(d["const"]) if "const" in d else None,
        )


def default_spec(family: str, p: int, constant: float | None = None) -> KernelSpec:
    """Default kernel for ``p`` input features: kstar = 1/p.

    The polynomial default degree follows the libsvm convention (3);
    degree-1 polynomial would collapse to an affine linear kernel.
    """
    if p < 1:
        raise InvalidInputError(f"p must be >= 1, got {p}")
    degree = 3 if family == "poly" else 1
    return KernelSpec(family=family, kstar=1.0 / p, degree=degree, constant=constant)


def _check_vector(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError(f"{name} must be a nonempty 1-D vector")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return x


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """Evaluate K(x, y) for two equal-length vectors."""
    x = _check_vector(x, "x")
    y = _check_vector(y, "y")
    if x.shape != y.shape:
        raise InvalidInputError(
            f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}"
        )
    if spec.family == "rbf":
        d = x - y
        return float(np.exp(-spec.kstar * np.dot(d, d)))
    dot = float(np.dot(x, y))
    if spec.family == "linear":
        return dot
    if spec.family == "poly":
        return float((spec.kstar * dot + spec.constant) ** spec.degree)
    return float(np.tanh(spec.kstar * dot + spec.constant))


def _check_matrix(X, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a nonempty 2-D matrix")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return X


def cross_kernel(spec: KernelSpec, A, B) -> np.ndarray:
    """Kernel matrix K[i, j] = K(A_i, B_j) between the rows of A and B."""
    A = _check_matrix(A, "A")
    B = _check_matrix(B, "B")
    if A.shape[1] != B.shape[1]:
        raise InvalidInputError(
            f"dimension mismatch: {A.shape[1]} vs {B.shape[1]} columns"
        )
    if spec.family == "rbf":
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-spec.kstar * sq)
    dot = A @ B.T
    if spec.family == "linear":
        return dot
    if spec.family == "poly":
        return (spec.kstar * dot + spec.constant) ** spec.degree
    return np.tanh(spec.kstar * dot + spec.constant)


def gram_matrix(spec: KernelSpec, X) -> np.ndarray:
    """n x n Gram matrix of the rows of X; exactly symmetric.

    For the RBF family the diagonal is exactly one.
    """
    X = _check_matrix(X, "X")
    if spec.family == "rbf":
        sq = np.sum(X * X, axis=1)
        sq = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.maximum(sq, 0.0, out=sq)
        sq = 0.5 * (sq + sq.T)
        np.fill_diagonal(sq, 0.0)
        return np.exp(-spec.kstar * sq)
    dot = X @ X.T
    dot = 0.5 * (dot + dot.T)
    if spec.family == "linear":
        return dot
    if spec.family == "poly":
        return (spec.kstar * dot + spec.constant) ** spec.degree
    return np.tanh(spec.kstar * dot + spec.constant)


def with_constant(spec: KernelSpec, constant: float | None) -> KernelSpec:
    """Copy of ``spec`` with its offset replaced (None keeps the family default)."""
    if constant is None:
        return spec
    return replace(spec, constant=constant)
