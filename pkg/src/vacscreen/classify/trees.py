"""Array-backed decision trees shared by the boosted and bagged ensembles.

Split semantics: a row goes left when ``x[feature] <= threshold``; the
threshold is the exact left-edge feature value of the chosen split, so
routing is reproducible and absent (zero) sparse entries route naturally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

_CHUNK = 2048


@dataclass
class Tree:
    """Flat node arrays; ``feature < 0`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X) -> np.ndarray:
        if sparse.issparse(X):
            out = np.empty(X.shape[0], dtype=np.float64)
            for start in range(0, X.shape[0], _CHUNK):
                block = X[start : start + _CHUNK].toarray()
                out[start : start + block.shape[0]] = self._predict_dense(block)
            return out
        return self._predict_dense(np.asarray(X, dtype=np.float64))

    def _predict_dense(self, X: np.ndarray) -> np.ndarray:
        n = X.shape[0]
        node = np.zeros(n, dtype=np.int64)
        active = self.feature[node] >= 0
        while np.any(active):
            idx = np.flatnonzero(active)
            cur = node[idx]
            feats = self.feature[cur]
            go_left = X[idx, feats] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] >= 0
        return self.value[node]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Tree":
        return cls(
            feature=np.asarray(data["feature"], dtype=np.int64),
            threshold=np.asarray(data["threshold"], dtype=np.float64),
            left=np.asarray(data["left"], dtype=np.int64),
            right=np.asarray(data["right"], dtype=np.int64),
            value=np.asarray(data["value"], dtype=np.float64),
        )


class TreeAssembler:
    """Accumulates nodes while a builder walks its frontier."""

    def __init__(self) -> None:
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add_leaf(self, value: float) -> int:
        return self._add(-1, 0.0, -1, -1, value)

    def add_split(self, feature: int, threshold: float) -> int:
        return self._add(feature, threshold, -1, -1, 0.0)

    def _add(self, feature: int, threshold: float, left: int, right: int,
             value: float) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(left)
        self.right.append(right)
        self.value.append(value)
        return len(self.feature) - 1

    def wire(self, parent: int, left: int, right: int) -> None:
        self.left[parent] = left
        self.right[parent] = right

    def build(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=np.float64),
        )


class ColumnStore:
    """Uniform dense-column access over dense or sparse matrices.

    Columns are densified lazily and cached; tree training touches columns
    repeatedly, and desk-scale matrices keep the cache affordable.
    """

    def __init__(self, X):
        if sparse.issparse(X):
            self._X = X.tocsc()
            self._dense = None
        else:
            self._dense = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
            self._X = None
        self._cache: dict[int, np.ndarray] = {}
        self.n_rows, self.n_cols = X.shape

    def column(self, j: int) -> np.ndarray:
        if self._dense is not None:
            return self._dense[:, j]
        cached = self._cache.get(j)
        if cached is None:
            cached = np.asarray(
                self._X[:, j].toarray().ravel(), dtype=np.float64
            )
            self._cache[j] = cached
        return cached
