"""ConfusionCounts counting, rate identities, and aggregation."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netinfer.data import Network
from netinfer.errors import InvalidInputError
from netinfer.metrics import ConfusionCounts, Rates, aggregate, confusion, rates


def net(adj):
    return Network(np.asarray(adj, dtype=np.int8))


def test_confusion_counts_example():
    truth = net([[1, 0], [1, 0]])
    pred = net([[1, 1], [0, 0]])
    c = confusion(truth, pred)
    assert (c.tp, c.fp, c.fn, c.tn) == (1, 1, 1, 1)
    assert c.total == 4


def test_rates_worked_example():
    # 10 true edges, 10 true non-edges: tp=7 fn=3 fp=1 tn=9.
    r = rates(ConfusionCounts(tp=7, fn=3, fp=1, tn=9))
    assert r.tpr == pytest.approx(0.7, abs=1e-12)
    assert r.fnr == pytest.approx(0.3, abs=1e-12)
    assert r.fpr == pytest.approx(0.1, abs=1e-12)
    assert r.tnr == pytest.approx(0.9, abs=1e-12)
    assert r.mce == pytest.approx(0.2, abs=1e-12)


def test_rates_are_correctly_rounded():
    # Each rate equals its exact rational value rounded once to binary64.
    rng = np.random.default_rng(42)
    for _ in range(200):
        tp, fn, fp, tn = (int(v) for v in rng.integers(0, 40, size=4))
        if tp + fn == 0 or fp + tn == 0:
            continue
        r = rates(ConfusionCounts(tp=tp, fn=fn, fp=fp, tn=tn))
        assert r.tpr == float(Fraction(tp, tp + fn))
        assert r.fpr == float(Fraction(fp, fp + tn))
        assert r.mce == float(Fraction(fp + fn, tp + fn + fp + tn))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 500), st.integers(0, 500),
       st.integers(0, 500), st.integers(0, 500))
def test_rate_sums_are_exactly_one(tp, fn, fp, tn):
    if tp + fn == 0 or fp + tn == 0:
        return
    r = rates(ConfusionCounts(tp=tp, fn=fn, fp=fp, tn=tn))
    assert r.tpr + r.fnr == 1.0
    assert r.tnr + r.fpr == 1.0


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 500), st.integers(0, 500),
       st.integers(0, 500), st.integers(0, 500))
def test_mce_decomposition(tp, fn, fp, tn):
    # mce = fpr * neg/total + fnr * pos/total, checked in exact arithmetic.
    pos, neg = tp + fn, fp + tn
    if pos == 0 or neg == 0:
        return
    total = pos + neg
    r = rates(ConfusionCounts(tp=tp, fn=fn, fp=fp, tn=tn))
    exact = (Fraction(fp, neg) * Fraction(neg, total)
             + Fraction(fn, pos) * Fraction(pos, total))
    assert exact == Fraction(fp + fn, total)
    assert r.mce == float(exact)


def test_published_rate_back_calculation():
    # At p=50, pi=0.05: 125 positives, 2375 negatives.  A method with
    # tpr 0.86 and fpr 0.68 has mce = 0.68*2375/2500 + 0.14*125/2500.
    pos, neg = 125, 2375
    fp = round(0.68 * neg)
    fn = round(0.14 * pos)
    r = rates(ConfusionCounts(tp=pos - fn, fn=fn, fp=fp, tn=neg - fp))
    assert r.mce == pytest.approx(0.653, abs=1e-3)
    assert abs(r.mce - 0.66) <= 0.01


def test_zero_denominator_flagged():
    with pytest.warns(RuntimeWarning):
        r = rates(ConfusionCounts(tp=0, fn=0, fp=1, tn=3))
    assert r.tpr == 0.0
    assert r.fnr == 0.0
    with pytest.warns(RuntimeWarning):
        r = rates(ConfusionCounts(tp=2, fn=1, fp=0, tn=0))
    assert r.fpr == 0.0
    assert r.tnr == 0.0


def test_self_comparison_is_perfect():
    rng = np.random.default_rng(7)
    adj = (rng.random((50, 50)) < 0.05).astype(np.int8)
    truth = net(adj)
    c = confusion(truth, truth)
    assert c.tp == int(adj.sum())
    assert c.tn == 2500 - int(adj.sum())
    assert c.fp == 0 and c.fn == 0
    r = rates(c)
    assert r.tpr == 1.0 and r.fpr == 0.0 and r.mce == 0.0


def test_empty_estimate_rates():
    truth = net([[1, 1], [0, 1]])
    pred = net([[0, 0], [0, 0]])
    r = rates(confusion(truth, pred))
    assert r.tpr == 0.0 and r.fnr == 1.0
    assert r.fpr == 0.0 and r.tnr == 1.0
    assert r.mce == pytest.approx(3.0 / 4.0)


def test_confusion_shape_mismatch():
    with pytest.raises(InvalidInputError):
        confusion(net([[0, 1], [0, 0]]), net(np.zeros((3, 3), dtype=np.int8)))


def test_rates_empty_table():
    with pytest.raises(InvalidInputError):
        rates(ConfusionCounts(tp=0, fn=0, fp=0, tn=0))


def test_aggregate_mean_and_sd():
    a = Rates(tpr=0.4, fpr=0.2, tnr=0.8, fnr=0.6, mce=0.3)
    b = Rates(tpr=0.6, fpr=0.4, tnr=0.6, fnr=0.4, mce=0.5)
    agg = aggregate([a, b])
    assert agg.mean.tpr == pytest.approx(0.5)
    assert agg.mean.mce == pytest.approx(0.4)
    assert agg.sd.tpr == pytest.approx(np.std([0.4, 0.6], ddof=1))
    assert agg.count == 2


def test_aggregate_single_run_sd_zero():
    a = Rates(tpr=0.4, fpr=0.2, tnr=0.8, fnr=0.6, mce=0.3)
    agg = aggregate([a])
    assert agg.mean.tpr == 0.4
    assert agg.sd.tpr == 0.0
    assert agg.count == 1


def test_aggregate_empty_rejected():
    with pytest.raises(InvalidInputError):
        aggregate([])


def test_rates_array_round_trip():
    r = Rates(tpr=0.1, fpr=0.2, tnr=0.8, fnr=0.9, mce=0.25)
    assert Rates.from_array(r.as_array()) == r
