"""Annotation methodology: stratified assignment with a shared overlap
subset, three-way labels, Fleiss' kappa agreement, and majority-vote
pooling with exclusion of unresolved items.
"""

from __future__ import annotations

import json
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Sentence
from .errors import ConfigError, DataError, SchemaError
from .seeds import child_seed


class AnnotationLabel(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "?"

    @classmethod
    def parse(cls, value: str) -> "AnnotationLabel":
        for label in cls:
            if label.value == value:
                return label
        raise SchemaError(f"unknown annotation label {value!r}")


LABELS = (AnnotationLabel.YES, AnnotationLabel.NO, AnnotationLabel.UNKNOWN)


@dataclass(frozen=True)
class AnnotationRecord:
    sentence_id: str
    annotator_id: str
    label: AnnotationLabel
    timestamp: str = ""

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "annotator_id": self.annotator_id,
            "label": self.label.value,
            "timestamp": self.timestamp,
        }


def read_annotations_jsonl(path: str | Path) -> list[AnnotationRecord]:
    path = Path(path)
    records = []
    with path.open(encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                data = json.loads(raw)
                records.append(
                    AnnotationRecord(
                        sentence_id=data["sentence_id"],
                        annotator_id=data["annotator_id"],
                        label=AnnotationLabel.parse(data["label"]),
                        timestamp=data.get("timestamp", ""),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise SchemaError(f"{path.name}:{line_no}: bad annotation record") from exc
    return records


def write_annotations_jsonl(records: Iterable[AnnotationRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")


# --------------------------------------------------------------------------
# Assignment planning
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AssignmentPlan:
    """Who annotates what: a shared overlap subset plus exclusive shares."""

    overlap: tuple[str, ...]
    exclusive: dict[str, tuple[str, ...]]
    strata: dict[str, str]

    @property
    def roster(self) -> list[str]:
        return list(self.exclusive)

    def assignments_for(self, annotator_id: str) -> list[str]:
        if annotator_id not in self.exclusive:
            raise ConfigError(f"unknown annotator {annotator_id!r}")
        return list(self.overlap) + list(self.exclusive[annotator_id])

    def to_dict(self) -> dict:
        return {
            "overlap": list(self.overlap),
            "exclusive": {a: list(ids) for a, ids in self.exclusive.items()},
            "strata": dict(self.strata),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AssignmentPlan":
        return cls(
            overlap=tuple(data["overlap"]),
            exclusive={a: tuple(ids) for a, ids in data["exclusive"].items()},
            strata=dict(data["strata"]),
        )


def _quotas(group_sizes: dict[str, int], total: int) -> dict[str, int]:
    """Largest-remainder apportionment; per-group error stays below 1."""
    n = sum(group_sizes.values())
    raw = {g: total * size / n for g, size in group_sizes.items()}
    base = {g: math.floor(v) for g, v in raw.items()}
    leftover = total - sum(base.values())
    by_remainder = sorted(
        group_sizes, key=lambda g: (-(raw[g] - base[g]), g)
    )
    for g in by_remainder[:leftover]:
        base[g] += 1
    return base


def plan_assignment(
    sentences: Sequence[Sentence],
    annotators: Sequence[str],
    overlap_size: int,
    seed: int,
    strata: Mapping[str, str] | None = None,
) -> AssignmentPlan:
    """Sample a stratified overlap subset and split the remainder evenly.

    The overlap mirrors the full set's group proportions within one
    sentence per group; the remainder is dealt round-robin (continuing
    across groups) so each annotator's total differs by at most one.
    """
    if not annotators:
        raise ConfigError("annotator roster is empty")
    if len(set(annotators)) != len(annotators):
        raise ConfigError("annotator roster contains duplicates")
    ids = [s.id for s in sentences]
    if len(set(ids)) != len(ids):
        raise DataError("sentence ids must be unique")
    if overlap_size > len(ids):
        raise ConfigError(
            f"overlap_size {overlap_size} exceeds corpus size {len(ids)}"
        )
    strata = dict(strata) if strata is not None else {}
    groups_of: dict[str, str] = {sid: strata.get(sid, "all") for sid in ids}

    by_group: dict[str, list[str]] = defaultdict(list)
    for sid in ids:
        by_group[groups_of[sid]].append(sid)
    group_names = sorted(by_group)
    for g in group_names:
        rng = random.Random(child_seed(seed, "assign", g))
        by_group[g].sort()
        rng.shuffle(by_group[g])

    quotas = _quotas({g: len(by_group[g]) for g in group_names}, overlap_size)
    overlap: list[str] = []
    remainder: list[str] = []
    for g in group_names:
        overlap.extend(by_group[g][: quotas[g]])
        remainder.extend(by_group[g][quotas[g] :])

    exclusive: dict[str, list[str]] = {a: [] for a in annotators}
    for i, sid in enumerate(remainder):
        exclusive[annotators[i % len(annotators)]].append(sid)

    return AssignmentPlan(
        overlap=tuple(overlap),
        exclusive={a: tuple(v) for a, v in exclusive.items()},
        strata=groups_of,
    )


# --------------------------------------------------------------------------
# Fleiss' kappa
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AgreementReport:
    kappa_overall: float
    kappa_per_category: dict[str, float | None]
    subject_count: int
    category_count: int
    rater_count: int
    observed_agreement: float
    expected_agreement: float
    standard_error: float
    z: float
    p_value: float  # two-sided, large-sample approximation

    def to_dict(self) -> dict:
        return {
            "kappa_overall": self.kappa_overall,
            "kappa_per_category": self.kappa_per_category,
            "subject_count": self.subject_count,
            "category_count": self.category_count,
            "rater_count": self.rater_count,
            "observed_agreement": self.observed_agreement,
            "expected_agreement": self.expected_agreement,
            "standard_error": self.standard_error,
            "z": self.z,
            "p_value_approx": self.p_value,
        }


def agreement_table(
    records: Sequence[AnnotationRecord],
    categories: Sequence[str] = tuple(l.value for l in LABELS),
) -> tuple[np.ndarray, list[str]]:
    """Subject-by-category count table from a fully-crossed record set.

    Raises when rater counts differ across subjects, listing offenders.
    """
    seen: set[tuple[str, str]] = set()
    counts: dict[str, Counter] = defaultdict(Counter)
    for record in records:
        key = (record.sentence_id, record.annotator_id)
        if key in seen:
            raise DataError(
                f"duplicate annotation for sentence {key[0]!r} by {key[1]!r}"
            )
        seen.add(key)
        counts[record.sentence_id][record.label.value] += 1
    if not counts:
        raise DataError("no annotation records")
    subjects = sorted(counts)
    per_subject = {s: sum(counts[s].values()) for s in subjects}
    n = per_subject[subjects[0]]
    uneven = sorted(s for s, c in per_subject.items() if c != n)
    if uneven:
        raise DataError(
            f"subjects rated by unequal numbers of raters: {uneven[:10]}"
            + ("..." if len(uneven) > 10 else "")
        )
    if n < 2:
        raise DataError("agreement requires at least two raters per subject")
    table = np.array(
        [[counts[s][c] for c in categories] for s in subjects], dtype=np.int64
    )
    return table, subjects


def fleiss_kappa_from_table(
    table: np.ndarray,
    categories: Sequence[str] = tuple(l.value for l in LABELS),
) -> AgreementReport:
    """Chance-corrected agreement for a subjects-by-categories count table.

    kappa = (P_bar - Pe_bar) / (1 - Pe_bar) with
      P_i     = (sum_j n_ij^2 - n) / (n (n - 1))
      Pe_bar  = sum_j p_j^2,     p_j = sum_i n_ij / (N n)
    Per-category:
      kappa_j = 1 - sum_i n_ij (n - n_ij) / (N n (n-1) p_j q_j)
    The standard error is the large-sample null-hypothesis form, so z and
    the two-sided p-value are approximate.
    """
    table = np.asarray(table)
    if table.ndim != 2:
        raise DataError("agreement table must be 2-dimensional")
    subject_totals = table.sum(axis=1)
    if subject_totals.size == 0 or np.any(subject_totals != subject_totals[0]):
        raise DataError("every subject needs the same number of ratings")
    n = int(subject_totals[0])
    if n < 2:
        raise DataError("agreement requires at least two raters per subject")
    big_n = table.shape[0]

    # Category moments in integer arithmetic: exact, and therefore exactly
    # invariant under any permutation of the category columns.
    col_totals = [int(c) for c in table.sum(axis=0)]
    total = big_n * n
    p = np.array([c / total for c in col_totals])
    pe_bar = sum(c * c for c in col_totals) / total**2
    sum_p3 = sum(c * c * c for c in col_totals) / total**3

    p_i = (np.sum(table * table, axis=1) - n) / (n * (n - 1))
    p_bar = float(np.mean(p_i))

    if pe_bar == 1.0:
        # Single category used everywhere: observed agreement is perfect.
        kappa = 1.0
    else:
        kappa = (p_bar - pe_bar) / (1.0 - pe_bar)

    per_category: dict[str, float | None] = {}
    for j, name in enumerate(categories):
        pj = float(p[j])
        qj = 1.0 - pj
        if pj == 0.0 or qj == 0.0:
            per_category[name] = None  # undefined, not zero
            continue
        numerator = float(np.sum(table[:, j] * (n - table[:, j])))
        per_category[name] = 1.0 - numerator / (big_n * n * (n - 1) * pj * qj)

    if pe_bar == 1.0:
        se = float("nan")
        z = float("nan")
        p_value = float("nan")
    else:
        variance = (
            2.0
            * (pe_bar - (2.0 * n - 3.0) * pe_bar**2 + 2.0 * (n - 2.0) * sum_p3)
            / (big_n * n * (n - 1) * (1.0 - pe_bar) ** 2)
        )
        se = math.sqrt(max(variance, 0.0))
        z = kappa / se if se > 0 else float("inf")
        p_value = math.erfc(abs(z) / math.sqrt(2.0)) if math.isfinite(z) else 0.0

    return AgreementReport(
        kappa_overall=float(kappa),
        kappa_per_category=per_category,
        subject_count=big_n,
        category_count=table.shape[1],
        rater_count=n,
        observed_agreement=p_bar,
        expected_agreement=pe_bar,
        standard_error=se,
        z=z,
        p_value=p_value,
    )


def fleiss_kappa(records: Sequence[AnnotationRecord]) -> AgreementReport:
    """Agreement over a fully-crossed subset (e.g. the overlap sample)."""
    table, _ = agreement_table(records)
    return fleiss_kappa_from_table(table)


# --------------------------------------------------------------------------
# Pooling
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LabeledSentence:
    sentence_id: str
    text: str
    term_group: str
    hsd: bool


@dataclass(frozen=True)
class LabeledDataset:
    entries: tuple[LabeledSentence, ...]
    dropped: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def labels(self) -> np.ndarray:
        return np.array([e.hsd for e in self.entries], dtype=bool)

    def groups(self) -> list[str]:
        return [e.term_group for e in self.entries]

    def texts(self) -> list[str]:
        return [e.text for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "sentence_id": e.sentence_id,
                    "text": e.text,
                    "term_group": e.term_group,
                    "hsd": e.hsd,
                }
                for e in self.entries
            ],
            "dropped": list(self.dropped),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LabeledDataset":
        return cls(
            entries=tuple(
                LabeledSentence(
                    sentence_id=e["sentence_id"],
                    text=e["text"],
                    term_group=e["term_group"],
                    hsd=bool(e["hsd"]),
                )
                for e in data["entries"]
            ),
            dropped=tuple(data.get("dropped", ())),
        )


def write_labeled_dataset(dataset: LabeledDataset, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(dataset.to_dict(), ensure_ascii=False, indent=1),
        encoding="utf-8",
    )


def read_labeled_dataset(path: str | Path) -> LabeledDataset:
    try:
        return LabeledDataset.from_dict(
            json.loads(Path(path).read_text(encoding="utf-8"))
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise SchemaError(f"{Path(path).name}: bad labeled dataset") from exc


def _majority(votes: list[AnnotationLabel]) -> AnnotationLabel:
    counts = Counter(votes)
    ranked = counts.most_common()
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        # No strict majority: conservative, mirrors the exclusion of
        # uncertain items.
        return AnnotationLabel.UNKNOWN
    return ranked[0][0]


def pool_labels(
    records: Sequence[AnnotationRecord],
    plan: AssignmentPlan,
    sentences: Mapping[str, Sentence] | Sequence[Sentence],
) -> LabeledDataset:
    """Pool per-annotator labels into the binary HSD dataset.

    Overlap subjects take the strict majority over all raters (ties fall to
    "?"); exclusive subjects take their single record. Subjects resolving
    to "?" are dropped.
    """
    if not isinstance(sentences, Mapping):
        sentences = {s.id: s for s in sentences}
    roster = set(plan.roster)
    by_subject: dict[str, list[AnnotationRecord]] = defaultdict(list)
    for record in records:
        if record.annotator_id not in roster:
            raise DataError(f"annotator {record.annotator_id!r} not in plan roster")
        by_subject[record.sentence_id].append(record)

    owner: dict[str, str | None] = {sid: None for sid in plan.overlap}
    for annotator, sids in plan.exclusive.items():
        for sid in sids:
            owner[sid] = annotator

    missing = sorted(sid for sid in owner if sid not in by_subject)
    if missing:
        raise DataError(
            f"missing annotations for {len(missing)} subjects: {missing[:10]}"
            + ("..." if len(missing) > 10 else "")
        )
    unknown_subjects = sorted(set(by_subject) - set(owner))
    if unknown_subjects:
        raise DataError(f"records for subjects outside the plan: {unknown_subjects[:10]}")

    entries: list[LabeledSentence] = []
    dropped: list[str] = []
    for sid in list(plan.overlap) + [
        s for a in plan.exclusive.values() for s in a
    ]:
        subject_records = by_subject[sid]
        if owner[sid] is None:
            raters = {r.annotator_id for r in subject_records}
            if raters != roster:
                raise DataError(
                    f"overlap subject {sid!r} lacks ratings from: "
                    f"{sorted(roster - raters)}"
                )
            label = _majority([r.label for r in subject_records])
        else:
            if len(subject_records) != 1:
                raise DataError(
                    f"exclusive subject {sid!r} has {len(subject_records)} records"
                )
            label = subject_records[0].label
        if label is AnnotationLabel.UNKNOWN:
            dropped.append(sid)
            continue
        sentence = sentences.get(sid)
        entries.append(
            LabeledSentence(
                sentence_id=sid,
                text=sentence.text if sentence else "",
                term_group=plan.strata.get(sid, "all"),
                hsd=(label is AnnotationLabel.YES),
            )
        )
    return LabeledDataset(entries=tuple(entries), dropped=tuple(dropped))
