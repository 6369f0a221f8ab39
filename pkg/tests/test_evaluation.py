import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gadaboost.evaluation import EvalReport, compare, confusion_matrix, ranking, score, timed, timed_mean


def test_perfect():
    r = score([0, 1, 2], [0, 1, 2], 3)
    assert r.accuracy == 1.0 and r.macro_f1 == 1.0


def test_hand_computed():
    r = score([0, 1, 1, 1], [0, 0, 1, 1], 2)
    assert r.accuracy == 0.75
    assert r.f1 == pytest.approx([2 / 3, 0.8])
    assert r.macro_f1 == pytest.approx(0.7333333333333333)
    assert r.confusion == [[1, 1], [0, 2]]


def test_single_class_predictions():
    r = score([1, 1, 1, 1], [0, 0, 1, 1], 2)
    assert r.accuracy == 0.5
    assert r.macro_f1 == pytest.approx((2 / 3 + 0) / 2)


def test_zero_support_class_counts_as_zero():
    r = score([0, 1], [0, 1], 3)
    assert r.macro_f1 == pytest.approx(2 / 3)


def test_arity():
    with pytest.raises(ValueError):
        score([0, 1], [0], 2)
    with pytest.raises(ValueError):
        confusion_matrix([], [], 2)


@given(seed=st.integers(0, 10**6), n=st.integers(1, 60))
def test_permutation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    p, t = rng.integers(0, 4, n), rng.integers(0, 4, n)
    perm = rng.permutation(n)
    a, b = score(p, t, 4), score(p[perm], t[perm], 4)
    assert a.accuracy == b.accuracy and a.macro_f1 == pytest.approx(b.macro_f1, abs=1e-15)
    assert 0 <= a.macro_f1 <= 1


def test_report_roundtrip():
    r = score([0, 1, 1], [0, 1, 0], 2)
    r.fit_ms = 3.0
    assert EvalReport.from_dict(r.to_dict()) == r


def rows(acc_ref, acc_riv, f1=None):
    out = []
    for i, (a, b) in enumerate(zip(acc_ref, acc_riv)):
        out.append({"dataset": "d", "algorithm": "gsa", "noise": 0.1, "seed": i, "accuracy": a,
                    "macro_f1": a if f1 is None else f1})
        out.append({"dataset": "d", "algorithm": "samme", "noise": 0.1, "seed": i, "accuracy": b,
                    "macro_f1": b if f1 is None else f1})
    return out


def test_compare_identical_all_ties():
    table = compare(rows([0.5, 0.6], [0.5, 0.6]), "gsa")
    assert [(t["win"], t["loss"], t["tie"]) for t in table] == [(0, 0, 2), (0, 0, 2)]


def test_compare_counting():
    table = compare(rows([0.9, 0.9, 0.9, 0.8], [0.8, 0.8, 0.8, 0.8]), "gsa", metrics=("accuracy",))
    assert (table[0]["win"], table[0]["loss"], table[0]["tie"]) == (3, 0, 1)


def test_compare_tolerance():
    table = compare(rows([0.80005], [0.8]), "gsa", metrics=("accuracy",))
    assert table[0]["tie"] == 1


def test_compare_antisymmetric():
    r = rows([0.9, 0.7, 0.8], [0.8, 0.8, 0.8])
    a = compare(r, "gsa")[0]
    b = compare(r, "samme")[0]
    assert (a["win"], a["loss"], a["tie"]) == (b["loss"], b["win"], b["tie"])


def test_compare_rival_order_and_errors():
    r = rows([0.5], [0.6])
    r.append({"dataset": "d", "algorithm": "rob", "noise": 0.1, "seed": 0, "accuracy": 0.9, "macro_f1": 0.9})
    assert [t["rival"] for t in compare(r, "gsa", metrics=("accuracy",))] == ["rob", "samme"]
    assert [a for a, _ in ranking(r)] == ["rob", "samme", "gsa"]
    with pytest.raises(ValueError, match="lacks"):
        compare(rows([0.5, 0.6], [0.6, 0.7])[:-1], "gsa")
    with pytest.raises(ValueError, match="two"):
        compare(r[:1], "gsa")
    with pytest.raises(ValueError):
        compare(r, "xgb")


def test_timed():
    _, ms = timed(lambda: None)
    assert ms >= 0
    calls = []
    res, outer = timed(lambda: timed(lambda: time.sleep(0.002)))
    assert res[1] <= outer
    res, mean, times = timed_mean(lambda: calls.append(1), repeats=5)
    assert len(calls) == 6 and len(times) == 5 and mean == pytest.approx(np.mean(times))
