"""Random forest with class-weighted Gini splits.

Bootstrap sampling indexes positions in a canonical row order (content
hash, then a seeded shuffle), so training is invariant to the order rows
happen to arrive in: permuting the training set changes nothing.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np
from scipy import sparse

from ..seeds import child_seed
from .grids import balanced_class_weights
from .kernels import best_split_gini
from .logistic import _validate
from .model import EnsembleParams, FeatureSpace, TrainedModel
from .trees import ColumnStore, Tree, TreeAssembler


def _canonical_order(X, y: np.ndarray, seed: int) -> np.ndarray:
    digests = []
    is_sparse = sparse.issparse(X)
    csr = X.tocsr() if is_sparse else None
    for i in range(X.shape[0]):
        if is_sparse:
            row = csr.getrow(i)
            material = row.indices.tobytes() + row.data.tobytes()
        else:
            material = np.ascontiguousarray(X[i], dtype=np.float64).tobytes()
        material += b"\x01" if y[i] else b"\x00"
        digests.append(hashlib.sha256(material).digest())
    by_content = np.asarray(sorted(range(len(digests)), key=digests.__getitem__))
    perm = np.random.default_rng(child_seed(seed, "shuffle")).permutation(len(digests))
    return by_content[perm]


def _fit_tree(
    store: ColumnStore,
    rows: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    rng: np.random.Generator,
    *,
    max_depth: int,
    min_samples_split: int,
    n_features_per_split: int,
) -> Tree:
    assembler = TreeAssembler()
    pos_weights = np.where(y == 1, weights, 0.0)

    def leaf(rows: np.ndarray) -> int:
        w = float(np.sum(weights[rows]))
        p = float(np.sum(pos_weights[rows]))
        return assembler.add_leaf(p / w)

    def grow(rows: np.ndarray, depth: int) -> int:
        labels = y[rows]
        if (
            depth >= max_depth
            or rows.shape[0] < min_samples_split
            or np.all(labels == labels[0])
        ):
            return leaf(rows)
        features = np.sort(
            rng.choice(store.n_cols, size=n_features_per_split, replace=False)
        )
        best_dec = 0.0
        best = None
        for j in features:
            col = store.column(int(j))[rows]
            order = np.argsort(col, kind="stable")
            dec, pos = best_split_gini(
                np.ascontiguousarray(col[order]),
                np.ascontiguousarray(weights[rows][order]),
                np.ascontiguousarray(pos_weights[rows][order]),
            )
            if pos >= 0 and dec > best_dec:
                best_dec = dec
                best = (int(j), float(col[order[pos]]))
        if best is None:
            return leaf(rows)
        feature, threshold = best
        node = assembler.add_split(feature, threshold)
        mask = store.column(feature)[rows] <= threshold
        left = grow(rows[mask], depth + 1)
        right = grow(rows[~mask], depth + 1)
        assembler.wire(node, left, right)
        return node

    grow(rows, 0)
    return assembler.build()


def train_forest(
    X,
    y,
    *,
    n_estimators: int = 200,
    max_depth: int = 10,
    min_samples_split: int = 2,
    class_weight="balanced",
    seed: int = 0,
) -> TrainedModel:
    """Fit ``n_estimators`` trees on bootstrap samples with sqrt-feature
    subsampling per split; scores are mean per-tree positive-class leaf
    frequencies (class-weighted)."""
    y = np.asarray(y, dtype=np.float64).ravel()
    _validate(X, y)
    if class_weight == "balanced":
        w_neg, w_pos = balanced_class_weights(y)
    elif class_weight is None:
        w_neg = w_pos = 1.0
    else:
        w_neg, w_pos = float(class_weight[0]), float(class_weight[1])
    weights = np.where(y == 1, w_pos, w_neg)

    store = ColumnStore(X)
    n = X.shape[0]
    n_features_per_split = max(1, int(math.sqrt(store.n_cols)))
    canonical = _canonical_order(X, y, seed)

    trees: list[Tree] = []
    for t in range(n_estimators):
        rng = np.random.default_rng(child_seed(seed, "tree", t))
        draws = rng.integers(0, n, size=n)
        rows = canonical[draws]
        trees.append(
            _fit_tree(
                store,
                rows,
                y,
                weights,
                rng,
                max_depth=max_depth,
                min_samples_split=min_samples_split,
                n_features_per_split=n_features_per_split,
            )
        )

    return TrainedModel(
        kind="forest",
        feature_space=FeatureSpace(kind="raw", dimension=X.shape[1]),
        seed=seed,
        hyperparameters={
            "n_estimators": n_estimators,
            "max_depth": max_depth,
            "min_samples_split": min_samples_split,
            "class_weight": "balanced" if class_weight == "balanced" else class_weight,
        },
        params=EnsembleParams(trees=trees, aggregation="mean"),
        diagnostics={},
    )
