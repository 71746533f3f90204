import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from streamveil.errors import ValidationError
from streamveil.evaluate import (
    CMM,
    ContingencyTable,
    best_matching,
    build_cmm,
    cmm_accuracy,
    contingency,
    misclassification,
    precision_measure,
    recall_measure,
)


def exhaustive_matching(freq):
    """Best total over every injective map from the smaller side."""
    freq = np.asarray(freq)
    r, c = freq.shape
    if r <= c:
        return max(sum(freq[i, p[i]] for i in range(r)) for p in itertools.permutations(range(c), r))
    return max(sum(freq[p[j], j] for j in range(c)) for p in itertools.permutations(range(r), c))


def brute_precision(c):
    """Per-cluster F1 of the majority class, averaged over non-empty clusters."""
    c = np.asarray(c, dtype=float)
    scores = []
    for i in range(c.shape[0]):
        row = c[i].sum()
        if row == 0:
            continue
        j = max(range(c.shape[1]), key=lambda jj: (c[i, jj], -jj))
        p, r = c[i, j] / row, c[i, j] / c[:, j].sum()
        scores.append(0.0 if p + r == 0 else 2 * p * r / (p + r))
    return sum(scores) / len(scores)


def brute_recall(c):
    c = np.asarray(c, dtype=float)
    scores = []
    for j in range(c.shape[1]):
        col = c[:, j].sum()
        if col == 0:
            continue
        best = 0.0
        for i in range(c.shape[0]):
            row = c[i].sum()
            if row == 0:
                continue
            p, r = c[i, j] / row, c[i, j] / col
            best = max(best, 0.0 if p + r == 0 else 2 * p * r / (p + r))
        scores.append(best)
    return sum(scores) / len(scores)


@pytest.mark.parametrize(
    "orig, pert, expected",
    [
        ([0, 0, 1, 1], [0, 0, 1, 1], [[2, 0], [0, 2]]),
        ([0, 0, 1, 1], [1, 1, 0, 0], [[0, 2], [2, 0]]),
        ([0, 0, 1, 1, 1], [0, 1, 1, 1, 0], [[1, 1], [1, 2]]),
    ],
)
def test_build_cmm(orig, pert, expected):
    assert build_cmm(orig, pert, 2, 2).freq.tolist() == expected


def test_build_cmm_errors():
    with pytest.raises(ValidationError):
        build_cmm([0, 1], [0], 2, 2)
    with pytest.raises(ValidationError):
        build_cmm([0, 2], [0, 1], 2, 2)


@settings(max_examples=100)
@given(st.integers(1, 6), st.integers(1, 6), st.lists(st.tuples(st.integers(0, 99), st.integers(0, 99)), max_size=200))
def test_cmm_margins(ko, kp, pairs):
    o = [a % ko for a, _ in pairs]
    p = [b % kp for _, b in pairs]
    cmm = build_cmm(o, p, ko, kp)
    assert cmm.total == len(pairs)
    assert cmm.freq.sum(axis=1).tolist() == [o.count(i) for i in range(ko)]
    assert cmm.freq.sum(axis=0).tolist() == [p.count(j) for j in range(kp)]


@pytest.mark.parametrize(
    "freq, perm, matched",
    [
        ([[2, 0], [0, 2]], {0: 0, 1: 1}, 4),
        ([[0, 2], [2, 0]], {0: 1, 1: 0}, 4),
        ([[8, 2], [1, 9]], {0: 0, 1: 1}, 17),
    ],
)
def test_best_matching_examples(freq, perm, matched):
    m = best_matching(CMM(np.array(freq)))
    assert m.perm == perm
    assert m.matched_count == matched
    assert exhaustive_matching(freq) == matched


@pytest.mark.parametrize(
    "freq, acc",
    [([[2, 0], [0, 2]], 100.0), ([[8, 2], [1, 9]], 85.0), ([[1, 1], [1, 1]], 50.0)],
)
def test_accuracy_and_misclassification(freq, acc):
    cmm = CMM(np.array(freq))
    m = best_matching(cmm)
    assert cmm_accuracy(cmm, m) == acc
    assert misclassification(cmm, m) == 100.0 - acc
    assert cmm_accuracy(cmm, m) + misclassification(cmm, m) == 100.0


def test_accuracy_of_empty_cmm():
    with pytest.raises(ValidationError):
        cmm_accuracy(CMM(np.zeros((2, 2), dtype=int)))


def test_rectangular_matching_counts_unmatched_as_misclassified():
    cmm = CMM(np.array([[5, 0], [0, 4], [3, 0]]))
    m = best_matching(cmm)
    assert len(m.perm) == 2
    assert len(set(m.perm.values())) == 2
    assert m.matched_count == 9 == exhaustive_matching(cmm.freq)
    assert cmm_accuracy(cmm, m) == pytest.approx(100 * 9 / 12)


@settings(max_examples=200)
@given(
    st.integers(1, 5).flatmap(
        lambda r: st.integers(1, 5).flatmap(lambda c: arrays(np.int64, (r, c), elements=st.integers(0, 20)))
    )
)
def test_matching_equals_exhaustive(freq):
    m = best_matching(CMM(freq))
    assert m.matched_count == exhaustive_matching(freq)
    assert len(set(m.perm.values())) == len(m.perm) == min(freq.shape)


@pytest.mark.parametrize(
    "assign, labels, domain, expected",
    [
        ([0, 1], ["A", "B"], ("A", "B"), [[1, 0], [0, 1]]),
        ([0, 0, 0], ["A", "A", "A"], ("A", "B"), [[3, 0], [0, 0]]),
        ([0, 0, 1, 1], ["A", "B", "B", "B"], ("A", "B"), [[1, 1], [0, 2]]),
    ],
)
def test_contingency(assign, labels, domain, expected):
    assert contingency(assign, labels, 2, domain).c.tolist() == expected


def test_contingency_errors():
    with pytest.raises(ValidationError):
        contingency([0, 1], ["A", "Z"], 2, ("A", "B"))
    with pytest.raises(ValidationError):
        contingency([0], ["A", "B"], 2, ("A", "B"))


@pytest.mark.parametrize(
    "table, prec, rec",
    [
        ([[10, 0], [0, 10]], 1.0, 1.0),
        ([[5, 5], [5, 5]], 0.5, 0.5),
        ([[10, 0], [0, 0]], 1.0, 1.0),
    ],
)
def test_precision_recall_hand_values(table, prec, rec):
    ct = ContingencyTable(np.array(table))
    assert precision_measure(ct) == prec
    assert recall_measure(ct) == rec


def test_precision_recall_worked_example():
    # cluster 0: 6 of class A (of 8 A total) + 2 B; cluster 1: 2 A + 4 B.
    ct = ContingencyTable(np.array([[6, 2], [2, 4]]))
    # precision: f1(0) = F(6/8, 6/8) = 0.75; f1(1) = F(4/6, 4/6) = 2/3
    assert precision_measure(ct) == pytest.approx((0.75 + 2 / 3) / 2)
    # recall: class A best = 0.75 (cluster 0), class B best = 2/3 (cluster 1)
    assert recall_measure(ct) == pytest.approx((0.75 + 2 / 3) / 2)


def test_empty_table_errors():
    with pytest.raises(ValidationError):
        precision_measure(ContingencyTable(np.zeros((2, 2))))
    with pytest.raises(ValidationError):
        recall_measure(ContingencyTable(np.zeros((2, 2))))


tables = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(lambda c: arrays(np.int64, (r, c), elements=st.integers(0, 30)))
).filter(lambda a: a.sum() > 0)


@settings(max_examples=300)
@given(tables)
def test_measures_match_brute_force_and_bounds(c):
    ct = ContingencyTable(c)
    p, r = precision_measure(ct), recall_measure(ct)
    assert p == pytest.approx(brute_precision(c), abs=1e-12)
    assert r == pytest.approx(brute_recall(c), abs=1e-12)
    assert 0.0 <= p <= 1.0 and 0.0 <= r <= 1.0


@settings(max_examples=200)
@given(tables, st.randoms(use_true_random=False))
def test_measures_invariant_under_row_permutation(c, rnd):
    rows = list(range(c.shape[0]))
    rnd.shuffle(rows)
    a, b = ContingencyTable(c), ContingencyTable(c[rows])
    assert recall_measure(b) == pytest.approx(recall_measure(a), abs=1e-12)
    assert precision_measure(b) == pytest.approx(precision_measure(a), abs=1e-12)
    cols = list(range(c.shape[1]))
    rnd.shuffle(cols)
    assert recall_measure(ContingencyTable(c[:, cols])) == pytest.approx(recall_measure(a), abs=1e-12)


@settings(max_examples=100)
@given(st.integers(1, 6), st.lists(st.integers(1, 50), min_size=6, max_size=6), st.randoms(use_true_random=False))
def test_permuted_diagonal_scores_one(k, sizes, rnd):
    c = np.diag(sizes[:k])
    perm = list(range(k))
    rnd.shuffle(perm)
    ct = ContingencyTable(c[perm])
    assert precision_measure(ct) == 1.0
    assert recall_measure(ct) == 1.0
    cmm = CMM(c[:, perm])
    assert cmm_accuracy(cmm) == 100.0
