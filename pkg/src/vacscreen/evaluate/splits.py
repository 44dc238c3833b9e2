"""Stratified train/test splits and k-fold plans.

Strata are (label, term group) cells; per-stratum train/test proportions
and per-fold counts never deviate from their targets by more than one
item. All assignments are deterministic under the root seed.
"""

from __future__ import annotations

import random
import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..annotate import LabeledDataset
from ..errors import ConfigError, DataError
from ..seeds import child_seed


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.3
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.test_fraction <= 1.0:
            raise ConfigError("test_fraction must be in [0, 1]")


def _strata(labels: Sequence[bool], groups: Sequence[str]) -> dict[tuple[str, bool], list[int]]:
    if len(labels) != len(groups):
        raise DataError("labels and groups misaligned")
    if len(labels) == 0:
        raise DataError("empty dataset")
    cells: dict[tuple[str, bool], list[int]] = defaultdict(list)
    for i, (label, group) in enumerate(zip(labels, groups)):
        cells[(group, bool(label))].append(i)
    return cells


def stratified_split_indices(
    labels: Sequence[bool],
    groups: Sequence[str],
    test_fraction: float,
    seed: int,
) -> tuple[list[int], list[int]]:
    """Disjoint, covering (train, test) index lists, sorted ascending.

    Per stratum, the test share is ``round(n * fraction)``; singleton
    strata land in train.
    """
    cells = _strata(labels, groups)
    train: list[int] = []
    test: list[int] = []
    for key in sorted(cells):
        members = sorted(cells[key])
        rng = random.Random(child_seed(seed, "split", key[0], key[1]))
        rng.shuffle(members)
        if len(members) == 1:
            n_test = 0
        else:
            n_test = int(len(members) * test_fraction + 0.5)
        test.extend(members[:n_test])
        train.extend(members[n_test:])
    return sorted(train), sorted(test)


def split_dataset(
    dataset: LabeledDataset, spec: SplitSpec
) -> tuple[LabeledDataset, LabeledDataset]:
    labels = [e.hsd for e in dataset.entries]
    groups = [e.term_group for e in dataset.entries]
    train_idx, test_idx = stratified_split_indices(
        labels, groups, spec.test_fraction, spec.seed
    )
    return (
        LabeledDataset(entries=tuple(dataset.entries[i] for i in train_idx)),
        LabeledDataset(entries=tuple(dataset.entries[i] for i in test_idx)),
    )


@dataclass(frozen=True)
class FoldPlan:
    """A partition of dataset indices into k folds."""

    folds: tuple[tuple[int, ...], ...]
    merged_groups: tuple[str, ...] = ()

    @property
    def k(self) -> int:
        return len(self.folds)

    def train_indices(self, fold: int) -> list[int]:
        held_out = set(self.folds[fold])
        return sorted(
            i for f in self.folds for i in f if i not in held_out
        )


def kfold(
    labels: Sequence[bool],
    groups: Sequence[str],
    k: int,
    seed: int,
) -> FoldPlan:
    """Stratified k-fold plan; strata smaller than k are merged into a
    per-label pool first (with a warning) so tiny term groups still fold."""
    if k < 2:
        raise ConfigError("k must be at least 2")
    if k > len(labels):
        raise ConfigError(f"k={k} exceeds dataset size {len(labels)}")
    cells = _strata(labels, groups)
    merged: set[str] = set()
    pooled: dict[tuple[str, bool], list[int]] = defaultdict(list)
    for (group, label), members in cells.items():
        if len(members) < k:
            merged.add(group)
            pooled[("__pooled__", label)].extend(members)
        else:
            pooled[(group, label)].extend(members)
    if merged:
        warnings.warn(
            f"strata smaller than k={k} merged into per-label pools: "
            f"{sorted(merged)}"
        )
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    for key in sorted(pooled):
        members = sorted(pooled[key])
        rng = random.Random(child_seed(seed, "fold", key[0], key[1]))
        rng.shuffle(members)
        for idx in members:
            folds[cursor % k].append(idx)
            cursor += 1
    return FoldPlan(
        folds=tuple(tuple(sorted(f)) for f in folds),
        merged_groups=tuple(sorted(merged)),
    )
