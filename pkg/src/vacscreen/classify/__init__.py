"""Class-imbalance-aware binary classifiers with probability scores.

Three trainers (L2 logistic regression, gradient-boosted trees, random
forest) share a common :class:`TrainedModel` container, the published
hyperparameter grids, and a JSON serialization that round-trips to
identical scores.
"""

from .grids import HYPERPARAMETER_GRIDS, balanced_class_weights
from .model import FeatureSpace, TrainedModel, check_feature_space, predict
from .logistic import train_logistic, logistic_objective
from .gbt import train_gbt
from .forest import train_forest
from .serialize import load_model, save_model, model_to_dict, model_from_dict
from .kernels import engine

__all__ = [
    "HYPERPARAMETER_GRIDS",
    "FeatureSpace",
    "TrainedModel",
    "balanced_class_weights",
    "check_feature_space",
    "engine",
    "load_model",
    "logistic_objective",
    "model_from_dict",
    "model_to_dict",
    "predict",
    "save_model",
    "train_forest",
    "train_gbt",
    "train_logistic",
]
