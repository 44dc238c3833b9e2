"""Gradient-boosted trees for the logistic loss.

Each round fits a regression tree to the first/second-order statistics of
the weighted logistic loss (positives scaled by ``scale_pos_weight``) with
exact greedy splits; leaves take the damped Newton step
``-learning_rate * G / (H + reg_lambda)``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from ..errors import DataError
from .kernels import best_split_grad_hess
from .logistic import _validate
from .model import EnsembleParams, FeatureSpace, TrainedModel
from .trees import ColumnStore, Tree, TreeAssembler


def _fit_tree(
    store: ColumnStore,
    rows: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    *,
    max_depth: int,
    min_child_weight: float,
    reg_lambda: float,
    learning_rate: float,
) -> Tree:
    assembler = TreeAssembler()

    def grow(rows: np.ndarray, depth: int) -> int:
        g_sum = float(np.sum(grad[rows]))
        h_sum = float(np.sum(hess[rows]))
        if depth >= max_depth or rows.shape[0] < 2:
            return assembler.add_leaf(-learning_rate * g_sum / (h_sum + reg_lambda))
        best_gain = 0.0
        best = None
        for j in range(store.n_cols):
            col = store.column(j)[rows]
            order = np.argsort(col, kind="stable")
            gain, pos = best_split_grad_hess(
                np.ascontiguousarray(col[order]),
                np.ascontiguousarray(grad[rows][order]),
                np.ascontiguousarray(hess[rows][order]),
                reg_lambda,
                min_child_weight,
            )
            if pos >= 0 and gain > best_gain:
                best_gain = gain
                best = (j, float(col[order[pos]]))
        if best is None:
            return assembler.add_leaf(-learning_rate * g_sum / (h_sum + reg_lambda))
        feature, threshold = best
        node = assembler.add_split(feature, threshold)
        mask = store.column(feature)[rows] <= threshold
        left = grow(rows[mask], depth + 1)
        right = grow(rows[~mask], depth + 1)
        assembler.wire(node, left, right)
        return node

    grow(rows, 0)
    return assembler.build()


def train_gbt(
    X,
    y,
    *,
    min_child_weight: float = 2.0,
    learning_rate: float = 0.1,
    max_depth: int = 10,
    scale_pos_weight: float = 2.5,
    n_rounds: int = 200,
    reg_lambda: float = 1.0,
    early_stopping_rounds: int | None = 10,
    seed: int = 0,
) -> TrainedModel:
    """Boost up to ``n_rounds`` trees; stops early when the training loss
    has not improved for ``early_stopping_rounds`` rounds (None disables;
    improvements below 1e-9 relative count as none).

    ``diagnostics["train_loss"]`` records the weighted mean log-loss after
    every round.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    _validate(X, y)
    if reg_lambda <= 0:
        raise DataError("reg_lambda must be positive")
    store = ColumnStore(X)
    n = X.shape[0]
    all_rows = np.arange(n)
    weights = np.where(y == 1, scale_pos_weight, 1.0)
    weight_total = float(np.sum(weights))

    raw = np.zeros(n)
    trees: list[Tree] = []
    losses: list[float] = []
    best_loss = np.inf
    stall = 0
    for _ in range(n_rounds):
        p = expit(raw)
        grad = weights * (p - y)
        hess = weights * p * (1.0 - p)
        tree = _fit_tree(
            store,
            all_rows,
            grad,
            hess,
            max_depth=max_depth,
            min_child_weight=min_child_weight,
            reg_lambda=reg_lambda,
            learning_rate=learning_rate,
        )
        trees.append(tree)
        raw += tree.predict(X)
        loss_terms = np.logaddexp(0.0, raw) - y * raw
        loss = float(np.dot(weights, loss_terms) / weight_total)
        losses.append(loss)
        improved = (
            loss < best_loss - 1e-9 * max(1.0, abs(best_loss))
            if np.isfinite(best_loss)
            else True
        )
        if improved:
            best_loss = loss
            stall = 0
        else:
            stall += 1
            if early_stopping_rounds is not None and stall >= early_stopping_rounds:
                break

    return TrainedModel(
        kind="gbt",
        feature_space=FeatureSpace(kind="raw", dimension=X.shape[1]),
        seed=seed,
        hyperparameters={
            "min_child_weight": min_child_weight,
            "learning_rate": learning_rate,
            "max_depth": max_depth,
            "scale_pos_weight": scale_pos_weight,
            "n_rounds": n_rounds,
            "reg_lambda": reg_lambda,
            "early_stopping_rounds": early_stopping_rounds,
        },
        params=EnsembleParams(trees=trees, aggregation="sum_sigmoid"),
        diagnostics={"train_loss": losses, "rounds_run": len(trees)},
    )
