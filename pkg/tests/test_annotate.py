from __future__ import annotations

import itertools
import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vacscreen.annotate import (
    AnnotationLabel,
    AnnotationRecord,
    LabeledDataset,
    agreement_table,
    fleiss_kappa,
    fleiss_kappa_from_table,
    plan_assignment,
    pool_labels,
)
from vacscreen.corpus import Sentence
from vacscreen.errors import ConfigError, DataError


def make_sentences(n: int) -> list[Sentence]:
    return [
        Sentence(id=f"s{i:04d}", vacancy_id="v", index=0, text=f"zin nummer {i}", span=(0, 10))
        for i in range(n)
    ]


# ---------------------------------------------------------------------------
# Independent direct-formula script for Fleiss' kappa (pure-Python loops,
# no shared code with the implementation).
# ---------------------------------------------------------------------------


def fleiss_oracle(table: list[list[int]]) -> float:
    big_n = len(table)
    n = sum(table[0])
    k = len(table[0])
    p = [sum(row[j] for row in table) / (big_n * n) for j in range(k)]
    p_i = [
        (sum(x * x for x in row) - n) / (n * (n - 1)) for row in table
    ]
    p_bar = sum(p_i) / big_n
    pe_bar = sum(x * x for x in p)
    return (p_bar - pe_bar) / (1 - pe_bar)


def fleiss_category_oracle(table: list[list[int]], j: int) -> float | None:
    big_n = len(table)
    n = sum(table[0])
    pj = sum(row[j] for row in table) / (big_n * n)
    qj = 1 - pj
    if pj == 0 or qj == 0:
        return None
    num = sum(row[j] * (n - row[j]) for row in table)
    return 1 - num / (big_n * n * (n - 1) * pj * qj)


def random_table(rng: random.Random, subjects: int, raters: int, k: int = 3):
    table = []
    for _ in range(subjects):
        row = [0] * k
        for _ in range(raters):
            row[rng.randrange(k)] += 1
        table.append(row)
    return table


def interesting_tables(count: int, seed: int = 0):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_table(rng, subjects=rng.randint(2, 30), raters=rng.randint(2, 7))


class TestFleissKappa:
    def test_unanimous_table_is_one(self):
        table = [[5, 0, 0], [0, 5, 0], [5, 0, 0], [0, 0, 5]]
        report = fleiss_kappa_from_table(np.asarray(table))
        assert report.kappa_overall == 1.0
        assert report.observed_agreement == 1.0

    def test_single_category_table_is_one(self):
        table = [[4, 0, 0], [4, 0, 0]]
        assert fleiss_kappa_from_table(np.asarray(table)).kappa_overall == 1.0

    def test_matches_oracle_on_random_tables(self):
        for table in interesting_tables(300, seed=5):
            expected = fleiss_oracle(table)
            got = fleiss_kappa_from_table(np.asarray(table))
            assert abs(got.kappa_overall - expected) <= 1e-12
            for j in range(3):
                cat = got.kappa_per_category[("yes", "no", "?")[j]]
                assert cat == pytest.approx(
                    fleiss_category_oracle(table, j), abs=1e-12
                ) or (cat is None and fleiss_category_oracle(table, j) is None)

    def test_category_permutation_invariance(self):
        rng = random.Random(1)
        for _ in range(50):
            table = random_table(rng, subjects=12, raters=4)
            base = fleiss_kappa_from_table(np.asarray(table)).kappa_overall
            for perm in itertools.permutations(range(3)):
                permuted = [[row[j] for j in perm] for row in table]
                got = fleiss_kappa_from_table(np.asarray(permuted)).kappa_overall
                assert got == base

    def test_unanimous_subject_cannot_decrease_observed_agreement(self):
        rng = random.Random(7)
        for _ in range(50):
            table = random_table(rng, subjects=8, raters=5)
            before = fleiss_kappa_from_table(np.asarray(table)).observed_agreement
            extended = table + [[5, 0, 0]]
            after = fleiss_kappa_from_table(np.asarray(extended)).observed_agreement
            assert after >= before - 1e-15

    def test_category_never_used_is_undefined(self):
        table = [[3, 2, 0], [1, 4, 0], [5, 0, 0]]
        report = fleiss_kappa_from_table(np.asarray(table))
        assert report.kappa_per_category["?"] is None
        assert report.kappa_per_category["yes"] is not None

    def test_se_and_z_reported(self):
        table = [[3, 2, 0], [1, 4, 0], [5, 0, 0], [2, 2, 1]]
        report = fleiss_kappa_from_table(np.asarray(table))
        assert report.standard_error > 0
        assert math.isfinite(report.z)
        assert 0.0 <= report.p_value <= 1.0

    def test_uneven_rater_counts_listed(self):
        records = [
            AnnotationRecord("s1", "a1", AnnotationLabel.YES),
            AnnotationRecord("s1", "a2", AnnotationLabel.YES),
            AnnotationRecord("s2", "a1", AnnotationLabel.NO),
        ]
        with pytest.raises(DataError, match="s2"):
            fleiss_kappa(records)

    def test_duplicate_record_rejected(self):
        records = [
            AnnotationRecord("s1", "a1", AnnotationLabel.YES),
            AnnotationRecord("s1", "a1", AnnotationLabel.NO),
        ]
        with pytest.raises(DataError, match="duplicate"):
            fleiss_kappa(records)

    def test_from_records_matches_table_route(self):
        rng = random.Random(3)
        labels = [AnnotationLabel.YES, AnnotationLabel.NO, AnnotationLabel.UNKNOWN]
        records = [
            AnnotationRecord(f"s{i}", f"a{j}", rng.choice(labels))
            for i in range(20)
            for j in range(4)
        ]
        via_records = fleiss_kappa(records)
        table, _ = agreement_table(records)
        via_table = fleiss_kappa_from_table(table)
        assert via_records == via_table


class TestPlanAssignment:
    def test_paper_scale_arithmetic(self):
        sentences = make_sentences(6000)
        strata = {s.id: f"g{i % 8}" for i, s in enumerate(sentences)}
        plan = plan_assignment(
            sentences, [f"a{i}" for i in range(5)], overlap_size=600, seed=1,
            strata=strata,
        )
        assert len(plan.overlap) == 600
        for annotator in plan.exclusive:
            assert len(plan.exclusive[annotator]) == 1080
            assert len(plan.assignments_for(annotator)) == 1680

    def test_overlap_equals_everything(self):
        sentences = make_sentences(40)
        plan = plan_assignment(sentences, ["a", "b"], overlap_size=40, seed=0)
        assert len(plan.overlap) == 40
        assert all(not ids for ids in plan.exclusive.values())

    def test_partition_properties(self):
        sentences = make_sentences(101)
        strata = {s.id: f"g{i % 3}" for i, s in enumerate(sentences)}
        plan = plan_assignment(sentences, ["a", "b", "c"], 31, seed=9, strata=strata)
        overlap = set(plan.overlap)
        exclusives = [set(v) for v in plan.exclusive.values()]
        for ex in exclusives:
            assert not overlap & ex
        for first, second in itertools.combinations(exclusives, 2):
            assert not first & second
        assert overlap | set().union(*exclusives) == {s.id for s in sentences}
        sizes = sorted(len(e) for e in exclusives)
        assert sizes[-1] - sizes[0] <= 1

    def test_overlap_group_proportions_within_one(self):
        rng = random.Random(4)
        sentences = make_sentences(500)
        strata = {s.id: rng.choice(["a", "b", "c", "d"]) for s in sentences}
        plan = plan_assignment(sentences, ["x", "y"], 100, seed=2, strata=strata)
        totals = Counter(strata.values())
        overlap_counts = Counter(strata[sid] for sid in plan.overlap)
        for group, total in totals.items():
            target = 100 * total / 500
            assert abs(overlap_counts[group] - target) < 1

    def test_deterministic_under_seed(self):
        sentences = make_sentences(50)
        a = plan_assignment(sentences, ["a", "b"], 10, seed=3)
        b = plan_assignment(sentences, ["a", "b"], 10, seed=3)
        c = plan_assignment(sentences, ["a", "b"], 10, seed=4)
        assert a == b
        assert a != c

    def test_empty_roster_rejected(self):
        with pytest.raises(ConfigError):
            plan_assignment(make_sentences(5), [], 2, seed=0)

    def test_oversized_overlap_rejected(self):
        with pytest.raises(ConfigError):
            plan_assignment(make_sentences(5), ["a"], 6, seed=0)


class TestPoolLabels:
    def build(self, n=10, annotators=("a1", "a2", "a3"), overlap=4, seed=0):
        sentences = make_sentences(n)
        plan = plan_assignment(sentences, list(annotators), overlap, seed=seed)
        return sentences, plan

    def test_majority_and_exclusive(self):
        sentences, plan = self.build()
        records = []
        for sid in plan.overlap:
            records.append(AnnotationRecord(sid, "a1", AnnotationLabel.YES))
            records.append(AnnotationRecord(sid, "a2", AnnotationLabel.YES))
            records.append(AnnotationRecord(sid, "a3", AnnotationLabel.NO))
        for annotator, sids in plan.exclusive.items():
            for sid in sids:
                records.append(AnnotationRecord(sid, annotator, AnnotationLabel.NO))
        dataset = pool_labels(records, plan, sentences)
        assert len(dataset.entries) + len(dataset.dropped) == len(sentences)
        by_id = {e.sentence_id: e for e in dataset.entries}
        for sid in plan.overlap:
            assert by_id[sid].hsd is True
        for sids in plan.exclusive.values():
            for sid in sids:
                assert by_id[sid].hsd is False

    def test_tie_resolves_to_dropped(self):
        sentences = make_sentences(1)
        plan = plan_assignment(sentences, ["a1", "a2", "a3", "a4", "a5"], 1, seed=0)
        votes = [
            AnnotationLabel.YES,
            AnnotationLabel.YES,
            AnnotationLabel.NO,
            AnnotationLabel.NO,
            AnnotationLabel.UNKNOWN,
        ]
        records = [
            AnnotationRecord("s0000", f"a{i+1}", vote) for i, vote in enumerate(votes)
        ]
        dataset = pool_labels(records, plan, sentences)
        assert dataset.entries == ()
        assert dataset.dropped == ("s0000",)

    def test_strict_majority_wins(self):
        sentences = make_sentences(1)
        plan = plan_assignment(sentences, ["a1", "a2", "a3", "a4", "a5"], 1, seed=0)
        votes = [
            AnnotationLabel.YES,
            AnnotationLabel.YES,
            AnnotationLabel.YES,
            AnnotationLabel.NO,
            AnnotationLabel.NO,
        ]
        records = [
            AnnotationRecord("s0000", f"a{i+1}", vote) for i, vote in enumerate(votes)
        ]
        dataset = pool_labels(records, plan, sentences)
        assert dataset.entries[0].hsd is True

    def test_unknown_single_record_dropped(self):
        sentences, plan = self.build(n=6, annotators=("a1", "a2"), overlap=0)
        records = []
        expected_dropped = []
        for annotator, sids in plan.exclusive.items():
            for i, sid in enumerate(sids):
                label = AnnotationLabel.UNKNOWN if i == 0 else AnnotationLabel.NO
                if i == 0:
                    expected_dropped.append(sid)
                records.append(AnnotationRecord(sid, annotator, label))
        dataset = pool_labels(records, plan, sentences)
        assert sorted(dataset.dropped) == sorted(expected_dropped)
        assert len(dataset.entries) + len(dataset.dropped) == 6

    def test_missing_records_rejected(self):
        sentences, plan = self.build(n=5, annotators=("a1", "a2"), overlap=2)
        with pytest.raises(DataError, match="missing"):
            pool_labels([], plan, sentences)

    def test_incomplete_overlap_rejected(self):
        sentences, plan = self.build(n=4, annotators=("a1", "a2"), overlap=4)
        records = [
            AnnotationRecord(sid, "a1", AnnotationLabel.YES) for sid in plan.overlap
        ]
        with pytest.raises(DataError, match="lacks ratings"):
            pool_labels(records, plan, sentences)

    def test_unknown_annotator_rejected(self):
        sentences, plan = self.build(n=4, annotators=("a1",), overlap=0)
        bad = [AnnotationRecord("s0000", "ghost", AnnotationLabel.YES)]
        with pytest.raises(DataError, match="ghost"):
            pool_labels(bad, plan, sentences)

    def test_size_invariant_random(self):
        rng = random.Random(11)
        sentences, plan = self.build(n=40, annotators=("a1", "a2", "a3"), overlap=10, seed=5)
        labels = [AnnotationLabel.YES, AnnotationLabel.NO, AnnotationLabel.UNKNOWN]
        records = []
        for sid in plan.overlap:
            for annotator in plan.roster:
                records.append(AnnotationRecord(sid, annotator, rng.choice(labels)))
        for annotator, sids in plan.exclusive.items():
            for sid in sids:
                records.append(AnnotationRecord(sid, annotator, rng.choice(labels)))
        dataset = pool_labels(records, plan, sentences)
        assert len(dataset.entries) + len(dataset.dropped) == 40
        dropped = set(dataset.dropped)
        assert all(e.sentence_id not in dropped for e in dataset.entries)
