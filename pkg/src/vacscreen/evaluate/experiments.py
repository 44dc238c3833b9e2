"""Experiment harness: pipelines, grid search, learning curves,
leave-one-term-out, and top-K discovery on unflagged sentences.

Every procedure takes one root seed; child seeds are derived per fold,
grid point, or held-out group, so whole experiments replay bit-for-bit.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence

import numpy as np

from ..annotate import LabeledDataset, LabeledSentence
from ..classify import (
    HYPERPARAMETER_GRIDS,
    FeatureSpace,
    TrainedModel,
    predict,
    train_forest,
    train_gbt,
    train_logistic,
)
from ..corpus import Sentence
from ..errors import ConfigError, DataError, VacscreenError
from ..features import (
    ContextualEmbeddingSource,
    EmbeddingTable,
    Vocabulary,
    contextual_matrix,
    embed_average_matrix,
    fit_vocabulary,
    transform_bow_matrix,
)
from ..seeds import child_seed
from ..terms import TermCatalog, baseline_flag
from .metrics import auc_roc, average_precision
from .splits import FoldPlan, kfold

_TRAINERS = {
    "logistic": train_logistic,
    "gbt": train_gbt,
    "forest": train_forest,
}

_METRICS = {"ap": average_precision, "auc": auc_roc}


@dataclass(frozen=True)
class MethodSpec:
    """A feature extractor plus a classifier family and its settings."""

    classifier: str
    features: str = "bow"
    params: Mapping = field(default_factory=dict)
    feature_params: Mapping = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.classifier not in _TRAINERS:
            raise ConfigError(f"unknown classifier {self.classifier!r}")
        if self.features not in ("bow", "w2v", "contextual"):
            raise ConfigError(f"unknown feature kind {self.features!r}")

    def with_params(self, params: Mapping) -> "MethodSpec":
        return MethodSpec(
            classifier=self.classifier,
            features=self.features,
            params=dict(params),
            feature_params=dict(self.feature_params),
        )

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier,
            "features": self.features,
            "params": dict(self.params),
            "feature_params": dict(self.feature_params),
        }


@dataclass
class FeatureContext:
    """External feature resources (loaded once, shared by experiments)."""

    embeddings: EmbeddingTable | None = None
    contextual: ContextualEmbeddingSource | None = None


class SentenceScorer(Protocol):
    def score_sentences(self, sentences: Sequence[Sentence]) -> np.ndarray: ...


@dataclass
class FittedPipeline:
    """A feature extractor fitted on training data plus a trained model."""

    method: MethodSpec
    model: TrainedModel
    vocabulary: Vocabulary | None = None
    context: FeatureContext | None = None

    def _featurize(self, ids: Sequence[str], texts: Sequence[str]):
        kind = self.method.features
        if kind == "bow":
            return transform_bow_matrix(texts, self.vocabulary)
        if kind == "w2v":
            rows, _ = embed_average_matrix(texts, self.context.embeddings)
            return rows
        return contextual_matrix(ids, self.context.contextual)

    def score_entries(self, entries: Sequence[LabeledSentence]) -> np.ndarray:
        X = self._featurize([e.sentence_id for e in entries], [e.text for e in entries])
        return predict(self.model, X)

    def score_sentences(self, sentences: Sequence[Sentence]) -> np.ndarray:
        X = self._featurize([s.id for s in sentences], [s.text for s in sentences])
        return predict(self.model, X)


def fit_pipeline(
    method: MethodSpec,
    train: Sequence[LabeledSentence],
    seed: int,
    context: FeatureContext | None = None,
) -> FittedPipeline:
    """Fit features on the training entries only, then train the model."""
    if not train:
        raise DataError("empty training set")
    context = context or FeatureContext()
    ids = [e.sentence_id for e in train]
    texts = [e.text for e in train]
    y = np.array([e.hsd for e in train], dtype=np.float64)

    vocabulary = None
    if method.features == "bow":
        fp = dict(method.feature_params)
        vocabulary = fit_vocabulary(
            texts,
            ngram_range=tuple(fp.get("ngram_range", (1, 2))),
            max_features=fp.get("max_features", 50_000),
        )
        X = transform_bow_matrix(texts, vocabulary)
        space = FeatureSpace("bow", len(vocabulary), vocabulary.fingerprint())
    elif method.features == "w2v":
        if context.embeddings is None:
            raise ConfigError("w2v features need an embedding table")
        X, _ = embed_average_matrix(texts, context.embeddings)
        space = FeatureSpace("w2v", context.embeddings.dimension)
    else:
        if context.contextual is None:
            raise ConfigError("contextual features need a vector source")
        X = contextual_matrix(ids, context.contextual)
        space = FeatureSpace(
            "contextual", context.contextual.dimension,
            context.contextual.provenance or None,
        )

    trainer = _TRAINERS[method.classifier]
    model = trainer(X, y, seed=seed, **dict(method.params))
    model.feature_space = space
    return FittedPipeline(
        method=method, model=model, vocabulary=vocabulary, context=context
    )


def _fold_plan(dataset: LabeledDataset, k: int, seed: int) -> FoldPlan:
    labels = [e.hsd for e in dataset.entries]
    groups = [e.term_group for e in dataset.entries]
    return kfold(labels, groups, k, child_seed(seed, "folds"))


def cross_validate(
    method: MethodSpec,
    dataset: LabeledDataset,
    k: int,
    seed: int,
    metric: str = "ap",
    context: FeatureContext | None = None,
    plan: FoldPlan | None = None,
) -> list[float]:
    """Per-fold test metric for a stratified k-fold plan."""
    measure = _METRICS[metric]
    if plan is None:
        plan = _fold_plan(dataset, k, seed)
    entries = dataset.entries
    scores: list[float] = []
    for i in range(plan.k):
        train_idx = plan.train_indices(i)
        test_idx = plan.folds[i]
        pipe = fit_pipeline(
            method,
            [entries[j] for j in train_idx],
            child_seed(seed, "fold", i),
            context,
        )
        predicted = pipe.score_entries([entries[j] for j in test_idx])
        truth = [entries[j].hsd for j in test_idx]
        scores.append(float(measure(predicted, truth)))
    return scores


@dataclass(frozen=True)
class GridSearchResult:
    metric: str
    best_params: dict
    best_mean: float
    rows: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "best_params": self.best_params,
            "best_mean": self.best_mean,
            "rows": list(self.rows),
        }


def grid_points(grid: Mapping[str, Sequence]) -> list[dict]:
    """Canonical enumeration: keys in mapping order, values in listed
    order, rightmost key varying fastest."""
    keys = list(grid)
    return [
        dict(zip(keys, combo))
        for combo in itertools.product(*(grid[k] for k in keys))
    ]


def grid_search(
    method: MethodSpec,
    grid: Mapping[str, Sequence] | None,
    dataset: LabeledDataset,
    k: int = 4,
    metric: str = "ap",
    seed: int = 0,
    context: FeatureContext | None = None,
) -> GridSearchResult:
    """Mean k-fold CV metric for every grid point; argmax wins, ties going
    to the first point in canonical order. Failing points are recorded,
    skipped, and warned about."""
    if metric not in _METRICS:
        raise ConfigError(f"unknown metric {metric!r}")
    if grid is None:
        grid = HYPERPARAMETER_GRIDS[method.classifier]
    points = grid_points(grid)
    if not points:
        raise ConfigError("empty hyperparameter grid")
    plan = _fold_plan(dataset, k, seed)
    rows: list[dict] = []
    best_params: dict | None = None
    best_mean = -np.inf
    for params in points:
        candidate = method.with_params({**dict(method.params), **params})
        try:
            fold_scores = cross_validate(
                candidate, dataset, k, seed, metric, context, plan=plan
            )
        except VacscreenError as exc:
            warnings.warn(f"grid point {params} failed: {exc}")
            rows.append({"params": params, "error": str(exc)})
            continue
        mean = float(np.mean(fold_scores))
        rows.append({"params": params, "fold_scores": fold_scores, "mean": mean})
        if mean > best_mean:
            best_mean = mean
            best_params = params
    if best_params is None:
        raise ConfigError("every grid point failed")
    return GridSearchResult(
        metric=metric,
        best_params=best_params,
        best_mean=best_mean,
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class LearningCurve:
    fractions: tuple[float, ...]
    values: tuple[tuple[float | None, ...], ...]  # [fold][fraction]
    means: tuple[float, ...]
    stds: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "fractions": list(self.fractions),
            "values": [list(row) for row in self.values],
            "means": list(self.means),
            "stds": list(self.stds),
        }


def log_fractions(n: int = 20, floor: float = 0.01) -> tuple[float, ...]:
    """Geometric scale from ``floor`` to 1.0; zero is unusable as a train
    share so the floor is explicit."""
    return tuple(float(f) for f in np.geomspace(floor, 1.0, n))


def learning_curve(
    method: MethodSpec,
    dataset: LabeledDataset,
    seed: int,
    k: int = 10,
    fractions: Sequence[float] | None = None,
    context: FeatureContext | None = None,
) -> LearningCurve:
    """AP as a function of training-set size.

    For each of k folds, the other k-1 folds form a pool from which nested,
    label-stratified subsamples are drawn at each fraction (smaller subsets
    are strict prefixes of larger ones); the held-out fold is fixed. The
    fraction-1.0 column therefore reproduces plain k-fold CV exactly.
    """
    fractions = tuple(fractions) if fractions is not None else log_fractions()
    plan = _fold_plan(dataset, k, seed)
    entries = dataset.entries
    values: list[list[float | None]] = []
    for i in range(plan.k):
        pool = plan.train_indices(i)
        test_idx = plan.folds[i]
        truth = [entries[j].hsd for j in test_idx]
        pos = [j for j in pool if entries[j].hsd]
        neg = [j for j in pool if not entries[j].hsd]
        rng = np.random.default_rng(child_seed(seed, "curve", i))
        pos_order = [pos[j] for j in rng.permutation(len(pos))]
        neg_order = [neg[j] for j in rng.permutation(len(neg))]
        row: list[float | None] = []
        for fraction in fractions:
            n_pos = max(1, int(len(pos_order) * fraction + 0.5)) if pos_order else 0
            n_neg = max(1, int(len(neg_order) * fraction + 0.5)) if neg_order else 0
            subset = sorted(pos_order[:n_pos] + neg_order[:n_neg])
            if n_pos == 0 or n_neg == 0:
                warnings.warn(
                    f"fold {i}: fraction {fraction:g} lacks a class; skipped"
                )
                row.append(None)
                continue
            pipe = fit_pipeline(
                method,
                [entries[j] for j in subset],
                child_seed(seed, "fold", i),
                context,
            )
            predicted = pipe.score_entries([entries[j] for j in test_idx])
            row.append(float(average_precision(predicted, truth)))
        values.append(row)

    means = []
    stds = []
    for col in range(len(fractions)):
        observed = [row[col] for row in values if row[col] is not None]
        means.append(float(np.mean(observed)) if observed else float("nan"))
        stds.append(float(np.std(observed)) if observed else float("nan"))
    return LearningCurve(
        fractions=fractions,
        values=tuple(tuple(row) for row in values),
        means=tuple(means),
        stds=tuple(stds),
    )


@dataclass(frozen=True)
class LotoRow:
    group: str
    n_train: int
    n_test: int
    test_prevalence: float
    ap: float | None
    note: str = ""


@dataclass(frozen=True)
class LotoReport:
    rows: tuple[LotoRow, ...]

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "group": r.group,
                    "n_train": r.n_train,
                    "n_test": r.n_test,
                    "test_prevalence": r.test_prevalence,
                    "ap": r.ap,
                    "note": r.note,
                }
                for r in self.rows
            ]
        }


def leave_one_term_out(
    method: MethodSpec,
    dataset: LabeledDataset,
    seed: int = 0,
    context: FeatureContext | None = None,
) -> LotoReport:
    """Each term group in turn becomes the test set; models train on the
    remaining groups only. Generalization to unseen terms."""
    entries = dataset.entries
    groups = sorted({e.term_group for e in entries})
    if len(groups) < 2:
        raise ConfigError("leave-one-term-out needs at least two term groups")
    rows: list[LotoRow] = []
    for group in groups:
        test_idx = [i for i, e in enumerate(entries) if e.term_group == group]
        train_idx = [i for i, e in enumerate(entries) if e.term_group != group]
        test_ids = {entries[i].sentence_id for i in test_idx}
        train_ids = {entries[i].sentence_id for i in train_idx}
        if test_ids & train_ids:
            raise DataError(f"group {group!r} leaks into its training set")
        truth = [entries[i].hsd for i in test_idx]
        prevalence = float(np.mean(truth)) if truth else 0.0
        if len(set(truth)) < 2:
            rows.append(
                LotoRow(group, len(train_idx), len(test_idx), prevalence,
                        None, "AP undefined: single-class test group")
            )
            continue
        train_truth = {entries[i].hsd for i in train_idx}
        if len(train_truth) < 2:
            rows.append(
                LotoRow(group, len(train_idx), len(test_idx), prevalence,
                        None, "untrainable: single-class training set")
            )
            continue
        pipe = fit_pipeline(
            method,
            [entries[i] for i in train_idx],
            child_seed(seed, "loto", group),
            context,
        )
        predicted = pipe.score_entries([entries[i] for i in test_idx])
        rows.append(
            LotoRow(
                group,
                len(train_idx),
                len(test_idx),
                prevalence,
                float(average_precision(predicted, truth)),
            )
        )
    return LotoReport(rows=tuple(rows))


@dataclass(frozen=True)
class DiscoveryItem:
    sentence_id: str
    text: str
    score: float
    verdict: str | None = None
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class DiscoveryReport:
    items: tuple[DiscoveryItem, ...]
    requested_k: int
    candidate_count: int
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "requested_k": self.requested_k,
            "candidate_count": self.candidate_count,
            "note": self.note,
            "items": [
                {
                    "sentence_id": i.sentence_id,
                    "text": i.text,
                    "score": i.score,
                    "verdict": i.verdict,
                    "tags": list(i.tags),
                }
                for i in self.items
            ],
        }


def discover_unknown(
    scorer: SentenceScorer,
    sentences: Sequence[Sentence],
    catalog: TermCatalog,
    k: int = 100,
) -> DiscoveryReport:
    """Rank sentences with no unsuppressed catalog match by model score and
    return the top K for human verdicts."""
    candidates = [s for s in sentences if not baseline_flag(s, catalog)]
    if not candidates:
        return DiscoveryReport(
            items=(), requested_k=k, candidate_count=0,
            note="no sentences without a catalog match",
        )
    scores = np.asarray(scorer.score_sentences(candidates), dtype=np.float64)
    ranked = sorted(
        zip(candidates, scores), key=lambda pair: (-pair[1], pair[0].id)
    )
    note = ""
    if len(candidates) < k:
        note = f"only {len(candidates)} unflagged candidates available"
    items = tuple(
        DiscoveryItem(sentence_id=s.id, text=s.text, score=float(score))
        for s, score in ranked[:k]
    )
    return DiscoveryReport(
        items=items, requested_k=k, candidate_count=len(candidates), note=note
    )
