"""Performance metrics: macro-averaged F1, R², adjusted mutual information."""
from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .tabular import DataError, _codes


def macro_f1(y_true, y_pred) -> float:
    """Unweighted mean of per-class F1 over the classes present in ``y_true``.

    A class with no true positives scores 0, which also covers the cases
    where its precision or recall is undefined.
    """
    y_true, y_pred = list(np.asarray(y_true, dtype=object)), list(np.asarray(y_pred, dtype=object))
    if len(y_true) != len(y_pred):
        raise DataError("y_true and y_pred differ in length")
    if not y_true:
        raise DataError("empty label vectors")
    uniq, codes = _codes(y_true + y_pred)
    t, p = codes[:len(y_true)], codes[len(y_true):]
    k = len(uniq)
    tp = np.bincount(t[t == p], minlength=k)
    true_n = np.bincount(t, minlength=k)
    pred_n = np.bincount(p, minlength=k)
    present = true_n > 0
    denom = true_n + pred_n
    f1 = np.where(tp > 0, 2 * tp / np.maximum(denom, 1), 0.0)
    return float(f1[present].mean())


def r2(y_true, y_pred) -> float:
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape:
        raise DataError("y_true and y_pred differ in length")
    ss_tot = ((y_true - y_true.mean()) ** 2).sum()
    if ss_tot == 0:
        raise DataError("R² is undefined for a constant y_true")
    return float(1.0 - ((y_true - y_pred) ** 2).sum() / ss_tot)


def contingency(labels_a, labels_b) -> np.ndarray:
    _, a = _codes(labels_a)
    _, b = _codes(labels_b)
    table = np.zeros((a.max() + 1, b.max() + 1), dtype=np.int64)
    np.add.at(table, (a, b), 1)
    return table


def entropy_from_counts(counts) -> float:
    c = np.asarray(counts, dtype=float)
    c = c[c > 0]
    p = c / c.sum()
    return float(-(p * np.log(p)).sum())


def mutual_info(table: np.ndarray) -> float:
    n = table.sum()
    a = table.sum(axis=1, keepdims=True)
    b = table.sum(axis=0, keepdims=True)
    nz = table > 0
    t = table[nz].astype(float)
    outer = (a * b)[nz].astype(float)
    return float((t / n * (np.log(t) + np.log(n) - np.log(outer))).sum())


def expected_mutual_info(a_sizes, b_sizes) -> float:
    """Expected MI of two labelings with the given cluster sizes under random permutation."""
    a = np.asarray(a_sizes, dtype=np.int64)
    b = np.asarray(b_sizes, dtype=np.int64)
    n = int(a.sum())
    if int(b.sum()) != n:
        raise DataError("cluster sizes must sum to the same n")
    nij = np.arange(1, max(a.max(), b.max()) + 1, dtype=float)
    term1 = nij / n
    log_nn = np.log(n) + np.log(nij)
    ga, gb = gammaln(a + 1), gammaln(b + 1)
    gna, gnb = gammaln(n - a + 1), gammaln(n - b + 1)
    gn, gnij = gammaln(n + 1), gammaln(nij + 1)
    emi = 0.0
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            if lo > hi:
                continue
            k = np.arange(lo, hi + 1)
            v = nij[k - 1]
            log_term2 = log_nn[k - 1] - np.log(ai) - np.log(bj)
            log_term3 = (ga[i] + gb[j] + gna[i] + gnb[j] - gn - gnij[k - 1]
                         - gammaln(ai - k + 1) - gammaln(bj - k + 1) - gammaln(n - ai - bj + k + 1))
            emi += float((v / n * log_term2 * np.exp(log_term3)).sum())
    return emi


def adjusted_mutual_information(labels_a, labels_b) -> float:
    """Chance-corrected MI, normalized by the arithmetic mean of the two entropies."""
    labels_a = np.asarray(labels_a, dtype=object)
    labels_b = np.asarray(labels_b, dtype=object)
    if len(labels_a) != len(labels_b):
        raise DataError("label vectors differ in length")
    if len(labels_a) == 0:
        raise DataError("empty label vectors")
    table = contingency(labels_a, labels_b)
    ka, kb = table.shape
    n = int(table.sum())
    if (ka == kb == 1) or (ka == kb == n):
        return 1.0
    a_sizes, b_sizes = table.sum(axis=1), table.sum(axis=0)
    mi = mutual_info(table)
    emi = expected_mutual_info(a_sizes, b_sizes)
    norm = 0.5 * (entropy_from_counts(a_sizes) + entropy_from_counts(b_sizes))
    denom = norm - emi
    if denom < 0:
        denom = min(denom, -np.finfo(float).eps)
    else:
        denom = max(denom, np.finfo(float).eps)
    return float((mi - emi) / denom)
