"""Small from-scratch learners: baselines, kNN, CART, ridge, k-means.

All estimators take plain numeric matrices (see ``tabular.one_hot_encode``)
and arbitrary hashable labels. Class ties always resolve to the smallest
class id.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream
from .tabular import DataError, _codes


class _LabelCodec:
    def fit(self, y):
        self.classes_, codes = _codes(y)
        return codes

    def decode(self, codes) -> np.ndarray:
        out = np.empty(len(codes), dtype=object)
        out[:] = [self.classes_[c] for c in codes]
        return out


def _check_train(y):
    if len(y) == 0:
        raise DataError("empty training set")


# -- baselines ---------------------------------------------------------------

class MajorityClassifier:
    name = "majority"

    def fit(self, X, y):
        _check_train(y)
        self._codec = _LabelCodec()
        codes = self._codec.fit(y)
        self.label_ = self._codec.classes_[int(np.bincount(codes).argmax())]
        return self

    def predict(self, X) -> np.ndarray:
        out = np.empty(len(X), dtype=object)
        out[:] = [self.label_] * len(X)
        return out


class ClassRatioClassifier:
    """Predicts labels drawn at random with the training label frequencies."""
    name = "class_ratio"

    def __init__(self, rng: RngStream):
        self.rng = rng

    def fit(self, X, y):
        _check_train(y)
        self._codec = _LabelCodec()
        codes = self._codec.fit(y)
        counts = np.bincount(codes)
        self.p_ = counts / counts.sum()
        return self

    def predict(self, X) -> np.ndarray:
        draws = self.rng.generator.choice(len(self.p_), size=len(X), p=self.p_)
        return self._codec.decode(draws)


class MeanRegressor:
    name = "mean"

    def fit(self, X, y):
        _check_train(y)
        self.mean_ = float(np.mean(np.asarray(y, dtype=float)))
        return self

    def predict(self, X) -> np.ndarray:
        return np.full(len(X), self.mean_)


# -- k nearest neighbours ----------------------------------------------------

class KNNClassifier:
    name = "knn"

    def __init__(self, k: int = 5, chunk: int = 256):
        if k < 1:
            raise DataError("k must be at least 1")
        self.k = k
        self.chunk = chunk

    def fit(self, X, y):
        _check_train(y)
        if self.k > len(y):
            raise DataError(f"k={self.k} exceeds the training size {len(y)}")
        self.X_ = np.asarray(X, dtype=float)
        self._codec = _LabelCodec()
        self.y_ = self._codec.fit(y)
        self._sq = (self.X_ ** 2).sum(axis=1)
        self._onehot = np.eye(len(self._codec.classes_))[self.y_]
        return self

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        n_cls = len(self._codec.classes_)
        out = np.empty(len(X), dtype=np.int64)
        for start in range(0, len(X), self.chunk):
            block = X[start:start + self.chunk]
            d = (block ** 2).sum(axis=1)[:, None] + self._sq[None, :] - 2.0 * block @ self.X_.T
            np.maximum(d, 0.0, out=d)
            kth = np.partition(d, self.k - 1, axis=1)[:, self.k - 1]
            within = d <= kth[:, None]
            votes = within.astype(float) @ self._onehot
            # rows with ties at the k-th distance hold more than k candidates:
            # keep the k lowest training rows among equal distances
            for i in np.flatnonzero(within.sum(axis=1) > self.k):
                cand = np.flatnonzero(within[i])
                idx = cand[np.argsort(d[i, cand], kind="stable")[:self.k]]
                votes[i] = np.bincount(self.y_[idx], minlength=n_cls)
            out[start:start + len(block)] = votes.argmax(axis=1)
        return self._codec.decode(out)


def knn_classify(X_train, y_train, X_test, k: int = 5) -> np.ndarray:
    return KNNClassifier(k).fit(X_train, y_train).predict(X_test)


# -- CART --------------------------------------------------------------------

@dataclass
class _Node:
    value: object
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


class DecisionTree:
    """Binary axis-parallel tree; Gini for classification, variance for regression."""

    def __init__(self, task: str = "classify", max_depth: int = 8, min_leaf: int = 5):
        if task not in ("classify", "regress"):
            raise DataError(f"unknown task {task!r}")
        self.task = task
        self.max_depth = max_depth
        self.min_leaf = max(1, min_leaf)

    @property
    def name(self) -> str:
        return "cart"

    def fit(self, X, y):
        _check_train(y)
        X = np.asarray(X, dtype=float)
        if self.task == "classify":
            self._codec = _LabelCodec()
            target = self._codec.fit(y)
            self._k = len(self._codec.classes_)
        else:
            target = np.asarray(y, dtype=float)
        self.root_ = self._grow(X, target, 0)
        return self

    def _leaf_value(self, y):
        if self.task == "classify":
            return int(np.bincount(y, minlength=self._k).argmax())
        return float(y.mean())

    def _impurity_gain(self, xs, ys):
        """Best split on one sorted feature: (gain, threshold) or None."""
        n = len(ys)
        lo, hi = self.min_leaf, n - self.min_leaf
        if hi < lo:
            return None
        # candidate cut after position i (left = [:i]) where the value changes
        cuts = np.arange(lo, hi + 1)
        cuts = cuts[xs[cuts - 1] < xs[np.minimum(cuts, n - 1)]]
        cuts = cuts[cuts < n]
        if len(cuts) == 0:
            return None
        nl = cuts.astype(float)
        nr = n - nl
        if self.task == "classify":
            onehot = np.zeros((n, self._k))
            onehot[np.arange(n), ys] = 1.0
            cum = np.cumsum(onehot, axis=0)
            left = cum[cuts - 1]
            right = cum[-1] - left
            gini_l = 1.0 - ((left / nl[:, None]) ** 2).sum(axis=1)
            gini_r = 1.0 - ((right / nr[:, None]) ** 2).sum(axis=1)
            parent = 1.0 - ((cum[-1] / n) ** 2).sum()
            score = parent - (nl * gini_l + nr * gini_r) / n
        else:
            cs, cs2 = np.cumsum(ys), np.cumsum(ys ** 2)
            sl, sl2 = cs[cuts - 1], cs2[cuts - 1]
            sr, sr2 = cs[-1] - sl, cs2[-1] - sl2
            sse = (sl2 - sl ** 2 / nl) + (sr2 - sr ** 2 / nr)
            parent = cs2[-1] - cs[-1] ** 2 / n
            score = (parent - sse) / n
        best = int(np.argmax(score))
        c = cuts[best]
        return float(score[best]), 0.5 * (xs[c - 1] + xs[c])

    def _grow(self, X, y, depth):
        node = _Node(self._leaf_value(y))
        if depth >= self.max_depth or len(y) < 2 * self.min_leaf:
            return node
        if self.task == "classify" and (y == y[0]).all():
            return node
        if self.task == "regress" and np.ptp(y) == 0:
            return node
        best = None
        for j in range(X.shape[1]):
            order = np.argsort(X[:, j], kind="stable")
            found = self._impurity_gain(X[order, j], y[order])
            if found is not None and found[0] > 1e-12 and (best is None or found[0] > best[0] + 1e-15):
                best = (found[0], j, found[1])
        if best is None:
            return node
        _, j, thr = best
        mask = X[:, j] <= thr
        node.feature, node.threshold = j, thr
        node.left = self._grow(X[mask], y[mask], depth + 1)
        node.right = self._grow(X[~mask], y[~mask], depth + 1)
        return node

    def depth(self) -> int:
        def walk(nd):
            return 0 if nd.is_leaf else 1 + max(walk(nd.left), walk(nd.right))
        return walk(self.root_)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = []
        for row in X:
            nd = self.root_
            while not nd.is_leaf:
                nd = nd.left if row[nd.feature] <= nd.threshold else nd.right
            out.append(nd.value)
        if self.task == "classify":
            return self._codec.decode(out)
        return np.asarray(out, dtype=float)


def cart_fit(X, y, task: str = "classify", max_depth: int = 8, min_leaf: int = 5) -> DecisionTree:
    return DecisionTree(task, max_depth, min_leaf).fit(X, y)


def cart_predict(model: DecisionTree, X) -> np.ndarray:
    return model.predict(X)


# -- ridge -------------------------------------------------------------------

class RidgeRegression:
    """Closed-form ridge with an unpenalized intercept."""
    name = "ridge"

    def __init__(self, alpha: float = 1.0):
        if alpha < 0:
            raise DataError("alpha must be non-negative")
        self.alpha = alpha

    def fit(self, X, y):
        _check_train(y)
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        x_mean, y_mean = X.mean(axis=0), y.mean()
        Xc, yc = X - x_mean, y - y_mean
        A = Xc.T @ Xc + self.alpha * np.eye(X.shape[1])
        if self.alpha == 0 and (X.shape[1] and np.linalg.matrix_rank(A) < X.shape[1]):
            raise DataError("singular system with alpha=0; use alpha > 0")
        self.coef_ = np.linalg.solve(A, Xc.T @ yc) if X.shape[1] else np.zeros(0)
        self.intercept_ = float(y_mean - x_mean @ self.coef_)
        return self

    def predict(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.coef_ + self.intercept_


def ridge_fit(X, y, alpha: float = 1.0) -> RidgeRegression:
    return RidgeRegression(alpha).fit(X, y)


def ridge_predict(model: RidgeRegression, X) -> np.ndarray:
    return model.predict(X)


# -- k-means -----------------------------------------------------------------

@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    history: list = field(default_factory=list)


def _sq_dists(X, C):
    d = (X ** 2).sum(axis=1)[:, None] + (C ** 2).sum(axis=1)[None, :] - 2.0 * X @ C.T
    return np.maximum(d, 0.0)


def _lloyd(X, k, rng: RngStream, max_iter: int) -> KMeansResult:
    uniq_rows = np.unique(X, axis=0, return_index=True)[1]
    pool = np.sort(uniq_rows) if len(uniq_rows) >= k else np.arange(len(X))
    centers = X[pool[rng.permutation(len(pool))[:k]]].copy()
    labels = None
    history = []
    for _ in range(max_iter):
        d = _sq_dists(X, centers)
        new = d.argmin(axis=1)
        # repair empty clusters with the point farthest from its centre
        for c in range(k):
            if not (new == c).any():
                own = d[np.arange(len(X)), new]
                counts = np.bincount(new, minlength=k)
                own[counts[new] <= 1] = -1.0
                far = int(own.argmax())
                new[far] = c
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.stack([X[labels == c].mean(axis=0) for c in range(k)])
        history.append(float(((X - centers[labels]) ** 2).sum()))
    return KMeansResult(labels, centers, history[-1], history)


def kmeans_cluster(X, k: int, rng: RngStream, max_iter: int = 100, n_init: int = 5) -> KMeansResult:
    """Best of ``n_init`` Lloyd runs by within-cluster sum of squares."""
    X = np.asarray(X, dtype=float)
    if k > len(X):
        raise DataError(f"k={k} exceeds the number of rows {len(X)}")
    if k < 1:
        raise DataError("k must be at least 1")
    best = None
    for i in range(n_init):
        res = _lloyd(X, k, rng.child(f"init:{i}"), max_iter)
        if best is None or res.inertia < best.inertia:
            best = res
    return best
