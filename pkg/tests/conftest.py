from __future__ import annotations

import pytest

from vacscreen.annotate import LabeledDataset, LabeledSentence
from vacscreen.corpus import SyntheticSpec, generate_synthetic
from vacscreen.terms import default_catalog, term_group


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid or report.when != "call":
        return
    name = report.nodeid.split("::")[-1].removeprefix("test_")
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[ACCEPTANCE] {name}: {status}", flush=True)


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


def synthetic_dataset(n: int, rate: float, seed: int, catalog) -> LabeledDataset:
    sentences, labels = generate_synthetic(
        SyntheticSpec(n_sentences=n, planted_hsd_rate=rate, seed=seed)
    )
    entries = tuple(
        LabeledSentence(
            sentence_id=s.id,
            text=s.text,
            term_group=term_group(s, catalog) or "none",
            hsd=bool(label),
        )
        for s, label in zip(sentences, labels)
    )
    return LabeledDataset(entries=entries)


@pytest.fixture(scope="session")
def small_dataset(catalog) -> LabeledDataset:
    return synthetic_dataset(300, 0.3, seed=17, catalog=catalog)
