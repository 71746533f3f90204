"""Clustering fidelity and quality measures.

Two families:

* original-vs-perturbed agreement: the cluster membership matrix (CMM),
  its optimal cluster correspondence, accuracy and misclassification;
* cluster-vs-class quality: the F1-based precision and recall measures
  computed from a cluster x class contingency table.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class CMM:
    freq: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freq)
        if f.ndim != 2 or np.any(f < 0):
            raise ValidationError("CMM must be a 2-d matrix of non-negative counts")
        object.__setattr__(self, "freq", f.astype(np.int64))

    @property
    def total(self) -> int:
        return int(self.freq.sum())

    def __eq__(self, other):
        return isinstance(other, CMM) and np.array_equal(self.freq, other.freq)


@dataclass(frozen=True)
class ClusterMatching:
    perm: dict[int, int]
    matched_count: int


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 2 or np.any(c < 0):
            raise ValidationError("contingency table must be a 2-d matrix of non-negative weights")
        object.__setattr__(self, "c", c)

    @property
    def total(self) -> float:
        return float(self.c.sum())


@dataclass(frozen=True)
class WindowReport:
    window_index: int
    n: int
    precision_orig: float
    recall_orig: float
    precision_pert: float
    recall_pert: float
    accuracy_pct: float
    misclassification_pct: float

    def to_dict(self):
        return asdict(self)


def _labels(a, name):
    arr = np.asarray(a)
    if arr.ndim != 1:
        raise ValidationError(f"{name} assignment must be 1-d")
    return arr.astype(np.int64)


def build_cmm(orig: Sequence[int], pert: Sequence[int], k_orig: int, k_pert: int) -> CMM:
    o = _labels(orig, "original")
    p = _labels(pert, "perturbed")
    if len(o) != len(p):
        raise ValidationError(f"assignment lengths differ: {len(o)} vs {len(p)}")
    if len(o) and (o.min() < 0 or o.max() >= k_orig or p.min() < 0 or p.max() >= k_pert):
        raise ValidationError("cluster id out of range")
    freq = np.zeros((k_orig, k_pert), dtype=np.int64)
    np.add.at(freq, (o, p), 1)
    return CMM(freq)


def best_matching(cmm: CMM) -> ClusterMatching:
    """Maximum-agreement injective correspondence original -> perturbed.

    With a non-square matrix the smaller side is fully matched and the
    surplus clusters stay unmatched.
    """
    rows, cols = linear_sum_assignment(cmm.freq, maximize=True)
    perm = {int(r): int(c) for r, c in zip(rows, cols)}
    matched = int(cmm.freq[rows, cols].sum())
    return ClusterMatching(perm, matched)


def cmm_accuracy(cmm: CMM, m: ClusterMatching | None = None) -> float:
    total = cmm.total
    if total == 0:
        raise ValidationError("accuracy of an empty CMM is undefined")
    if m is None:
        m = best_matching(cmm)
    return 100.0 * m.matched_count / total


def misclassification(cmm: CMM, m: ClusterMatching | None = None) -> float:
    return 100.0 - cmm_accuracy(cmm, m)


def contingency(
    assign: Sequence[int], labels: Sequence[str], k: int, class_domain: Sequence[str]
) -> ContingencyTable:
    a = _labels(assign, "cluster")
    if len(a) != len(labels):
        raise ValidationError(f"{len(a)} assignments but {len(labels)} labels")
    col = {c: j for j, c in enumerate(class_domain)}
    c = np.zeros((k, len(class_domain)))
    for i, lab in zip(a, labels):
        try:
            c[i, col[lab]] += 1
        except KeyError:
            raise ValidationError(f"label {lab!r} not in class domain") from None
        except IndexError:
            raise ValidationError(f"cluster id {i} out of range for k={k}") from None
    return ContingencyTable(c)


def _f1(p, r):
    s = p + r
    if s == 0:
        return 0.0
    return 2.0 * p * r / s


def precision_measure(ct: ContingencyTable) -> float:
    """Average over non-empty clusters of the F1 of each cluster against its
    majority class."""
    c = ct.c
    if ct.total <= 0:
        raise ValidationError("precision of an empty contingency table is undefined")
    row = c.sum(axis=1)
    col = c.sum(axis=0)
    total = 0.0
    real_clusters = 0
    for i in range(c.shape[0]):
        if row[i] == 0:
            continue
        real_clusters += 1
        j = int(np.argmax(c[i]))
        hit = c[i, j]
        total += _f1(hit / row[i], hit / col[j])
    return total / real_clusters


def recall_measure(ct: ContingencyTable) -> float:
    """Average over classes present of the best F1 any cluster reaches for
    that class."""
    c = ct.c
    if ct.total <= 0:
        raise ValidationError("recall of an empty contingency table is undefined")
    row = c.sum(axis=1)
    col = c.sum(axis=0)
    total = 0.0
    present = 0
    for j in range(c.shape[1]):
        if col[j] == 0:
            continue
        present += 1
        best = 0.0
        for i in range(c.shape[0]):
            if row[i] == 0:
                continue
            best = max(best, _f1(c[i, j] / row[i], c[i, j] / col[j]))
        total += best
    return total / present
