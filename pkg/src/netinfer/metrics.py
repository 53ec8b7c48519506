"""Edge-recovery scoring for inferred networks.

Every ordered cell of the p x p adjacency, diagonal included, is one
classification decision, so a p-variable problem has p^2 of them. The
misclassification error is (fp + fn) / p^2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import Network
from .errors import InvalidInputError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Rates:
    tpr: float
    fpr: float
    tnr: float
    fnr: float
    mce: float

    def as_array(self) -> np.ndarray:
        return np.array([self.tpr, self.fpr, self.tnr, self.fnr, self.mce])

    @classmethod
    def from_array(cls, a) -> "Rates":
        return cls(*(float(v) for v in a))


@dataclass(frozen=True)
class Aggregate:
    """Mean and sample standard deviation of rates over repeated runs."""

    mean: Rates
    sd: Rates
    count: int


def confusion(truth: Network, predicted: Network) -> ConfusionCounts:
    """Cell-wise confusion counts between two same-size networks."""
    if truth.adj.shape != predicted.adj.shape:
        raise InvalidInputError(
            f"network sizes differ: {truth.adj.shape} vs {predicted.adj.shape}"
        )
    t = truth.adj.astype(bool)
    q = predicted.adj.astype(bool)
    tp = int(np.count_nonzero(t & q))
    fp = int(np.count_nonzero(~t & q))
    tn = int(np.count_nonzero(~t & ~q))
    fn = int(np.count_nonzero(t & ~q))
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _safe_div(num: int, den: int, name: str) -> float:
    if den == 0:
        warnings.warn(
            f"{name} is 0/0 (no cases in its denominator); reporting 0.0",
            RuntimeWarning,
            stacklevel=3,
        )
        return 0.0
    return num / den


def rates(counts: ConfusionCounts) -> Rates:
    """TPR, FPR, TNR, FNR and misclassification error from counts.

    fnr and tnr are computed as complements (1 - tpr, 1 - fpr) so that
    tpr + fnr == 1.0 and tnr + fpr == 1.0 hold to the last bit whenever
    their denominators are nonzero; each complement stays within one
    ulp of its own definitional ratio. An empty denominator (e.g. FPR
    of a complete truth network) makes both rates of that pair 0.0 with
    a warning rather than NaN.
    """
    pos = counts.tp + counts.fn
    neg = counts.fp + counts.tn
    if counts.total == 0:
        raise InvalidInputError("empty confusion table")
    tpr = _safe_div(counts.tp, pos, "tpr")
    fpr = _safe_div(counts.fp, neg, "fpr")
    return Rates(
        tpr=tpr,
        fpr=fpr,
        tnr=1.0 - fpr if neg > 0 else _safe_div(counts.tn, neg, "tnr"),
        fnr=1.0 - tpr if pos > 0 else _safe_div(counts.fn, pos, "fnr"),
        mce=(counts.fp + counts.fn) / counts.total,
    )


def aggregate(rate_list) -> Aggregate:
    """Mean and sample sd (ddof=1) per rate; a single run has sd 0."""
    rate_list = list(rate_list)
    if not rate_list:
        raise InvalidInputError("nothing to aggregate")
    stack = np.vstack([r.as_array() for r in rate_list])
    mean = stack.mean(axis=0)
    if stack.shape[0] == 1:
        sd = np.zeros(stack.shape[1])
    else:
        sd = stack.std(axis=0, ddof=1)
    return Aggregate(mean=Rates.from_array(mean), sd=Rates.from_array(sd),
                     count=stack.shape[0])
