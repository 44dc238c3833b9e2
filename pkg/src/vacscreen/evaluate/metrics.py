"""Ranking metrics: precision-recall curves, average precision, ROC AUC.

Thresholds are the distinct predicted scores in descending order; tied
scores are processed atomically, making every metric a pure function of
the ranking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, UndefinedMetricError


def _validate(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel().astype(bool)
    if scores.shape[0] != labels.shape[0]:
        raise DataError(
            f"scores and labels misaligned: {scores.shape[0]} vs {labels.shape[0]}"
        )
    if scores.shape[0] == 0:
        raise DataError("empty inputs")
    if not np.all(np.isfinite(scores)):
        raise DataError("scores contain non-finite values")
    return scores, labels


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    true_positive: int
    false_positive: int
    false_negative: int
    precision: float
    recall: float

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "tp": self.true_positive,
            "fp": self.false_positive,
            "fn": self.false_negative,
            "precision": self.precision,
            "recall": self.recall,
        }


def pr_curve(scores, labels) -> list[PRPoint]:
    """One point per distinct score, descending; recall is non-decreasing
    and reaches 1 at the last point."""
    scores, labels = _validate(scores, labels)
    n_pos = int(np.count_nonzero(labels))
    if n_pos == 0:
        raise UndefinedMetricError("precision-recall is undefined without positives")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    # Last index of each tied block = cumulative counts at that threshold.
    distinct = np.flatnonzero(
        np.append(sorted_scores[1:] != sorted_scores[:-1], True)
    )
    cum_tp = np.cumsum(sorted_labels)
    points = []
    for idx in distinct:
        tp = int(cum_tp[idx])
        fp = int(idx + 1 - tp)
        points.append(
            PRPoint(
                threshold=float(sorted_scores[idx]),
                true_positive=tp,
                false_positive=fp,
                false_negative=n_pos - tp,
                precision=tp / (tp + fp),
                recall=tp / n_pos,
            )
        )
    return points


def average_precision_from_curve(points: list[PRPoint]) -> float:
    """Recall-increment-weighted mean of precision (R_0 = 0)."""
    ap = 0.0
    prev_recall = 0.0
    for point in points:
        ap += (point.recall - prev_recall) * point.precision
        prev_recall = point.recall
    return ap


def average_precision(scores, labels) -> float:
    """Area under the precision-recall curve via the threshold sweep."""
    return average_precision_from_curve(pr_curve(scores, labels))


def auc_roc(scores, labels) -> float:
    """Probability a random positive outranks a random negative (ties 1/2).

    Computed from mean ranks; equal to the pairwise concordance count.
    """
    scores, labels = _validate(scores, labels)
    n_pos = int(np.count_nonzero(labels))
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC is undefined with a single class")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(labels.shape[0], dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # average 1-based rank
        i = j + 1
    pos_rank_sum = float(np.sum(ranks[labels]))
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class EvalReport:
    ap: float
    auc: float
    pr_curve: tuple[PRPoint, ...]
    n_thresholds: int
    dataset: str

    def to_dict(self) -> dict:
        return {
            "ap": self.ap,
            "auc": self.auc,
            "n_thresholds": self.n_thresholds,
            "dataset": self.dataset,
            "pr_curve": [p.to_dict() for p in self.pr_curve],
        }


def make_eval_report(scores, labels, dataset: str = "") -> EvalReport:
    """Bundle AP, AUC and the PR curve; ``ap`` equals the sum over the
    report's own curve exactly (same arithmetic path)."""
    points = pr_curve(scores, labels)
    return EvalReport(
        ap=average_precision_from_curve(points),
        auc=auc_roc(scores, labels),
        pr_curve=tuple(points),
        n_thresholds=len(points),
        dataset=dataset,
    )
