"""Experimental machinery: splits, CV, grid search, ranking metrics,
learning curves, leave-one-term-out, and discovery."""

from .metrics import (
    EvalReport,
    PRPoint,
    auc_roc,
    average_precision,
    average_precision_from_curve,
    make_eval_report,
    pr_curve,
)
from .splits import FoldPlan, SplitSpec, kfold, split_dataset, stratified_split_indices
from .experiments import (
    DiscoveryItem,
    DiscoveryReport,
    FeatureContext,
    FittedPipeline,
    GridSearchResult,
    LearningCurve,
    LotoReport,
    LotoRow,
    MethodSpec,
    cross_validate,
    discover_unknown,
    fit_pipeline,
    grid_points,
    grid_search,
    learning_curve,
    leave_one_term_out,
    log_fractions,
)
from .reports import (
    dataset_hash,
    learning_curve_csv,
    load_report,
    pr_curve_csv,
    provenance,
    save_report,
)

__all__ = [
    "DiscoveryItem",
    "DiscoveryReport",
    "EvalReport",
    "FeatureContext",
    "FittedPipeline",
    "FoldPlan",
    "GridSearchResult",
    "LearningCurve",
    "LotoReport",
    "LotoRow",
    "MethodSpec",
    "PRPoint",
    "SplitSpec",
    "auc_roc",
    "average_precision",
    "average_precision_from_curve",
    "cross_validate",
    "dataset_hash",
    "discover_unknown",
    "fit_pipeline",
    "grid_points",
    "grid_search",
    "kfold",
    "learning_curve",
    "learning_curve_csv",
    "leave_one_term_out",
    "load_report",
    "log_fractions",
    "make_eval_report",
    "pr_curve",
    "pr_curve_csv",
    "provenance",
    "save_report",
    "split_dataset",
    "stratified_split_indices",
]
