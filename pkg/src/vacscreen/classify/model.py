"""Trained-model containers and the scoring entry point."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import sparse
from scipy.special import expit

from ..errors import DataError
from .trees import Tree


@dataclass(frozen=True)
class FeatureSpace:
    """Describes the representation a model was trained on.

    ``fingerprint`` is a content hash (e.g. of the vocabulary) used to
    refuse scoring vectors from a different feature pipeline.
    """

    kind: str
    dimension: int
    fingerprint: str | None = None


@dataclass
class LogisticParams:
    weights: np.ndarray
    bias: float


@dataclass
class EnsembleParams:
    trees: list[Tree]
    aggregation: str  # "sum_sigmoid" (gbt) or "mean" (forest)
    base_raw: float = 0.0


Params = Union[LogisticParams, EnsembleParams]


@dataclass
class TrainedModel:
    kind: str  # logistic | forest | gbt
    feature_space: FeatureSpace
    seed: int
    hyperparameters: dict
    params: Params
    diagnostics: dict = field(default_factory=dict)


def check_feature_space(model: TrainedModel, space: FeatureSpace) -> None:
    """Refuse to score features from a different pipeline."""
    expected = model.feature_space
    if expected.kind != space.kind or expected.dimension != space.dimension:
        raise DataError(
            f"feature space mismatch: model expects {expected.kind}/"
            f"{expected.dimension}, got {space.kind}/{space.dimension}"
        )
    if (
        expected.fingerprint is not None
        and space.fingerprint is not None
        and expected.fingerprint != space.fingerprint
    ):
        raise DataError("feature space fingerprint mismatch")


def predict(model: TrainedModel, X) -> np.ndarray:
    """Positive-class probabilities in [0, 1]; pure in (model, X)."""
    n_cols = X.shape[1]
    if n_cols != model.feature_space.dimension:
        raise DataError(
            f"dimension mismatch: model expects {model.feature_space.dimension} "
            f"features, got {n_cols}"
        )
    params = model.params
    if isinstance(params, LogisticParams):
        margin = X @ params.weights + params.bias
        if sparse.issparse(margin):  # pragma: no cover - X @ w is dense
            margin = np.asarray(margin).ravel()
        return expit(np.asarray(margin, dtype=np.float64).ravel())
    if not params.trees:
        if params.aggregation == "sum_sigmoid":
            return np.full(X.shape[0], expit(params.base_raw))
        return np.full(X.shape[0], 0.5)
    contributions = np.zeros(X.shape[0], dtype=np.float64)
    for tree in params.trees:
        contributions += tree.predict(X)
    if params.aggregation == "sum_sigmoid":
        return expit(params.base_raw + contributions)
    return contributions / len(params.trees)
