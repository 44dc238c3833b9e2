"""Report serialization with embedded provenance.

Reports are JSON with a fixed key order and no wall-clock content, so a
rerun with the same root seed is byte-identical. Curve data additionally
exports as CSV for plotting.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Sequence

from ..annotate import LabeledDataset
from .experiments import LearningCurve
from .metrics import PRPoint


def dataset_hash(dataset: LabeledDataset) -> str:
    """Content hash over entries and dropped ids."""
    material = json.dumps(dataset.to_dict(), ensure_ascii=False, sort_keys=True)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def provenance(
    seed: int,
    dataset: LabeledDataset | None = None,
    catalog_version: str | None = None,
    method: dict | None = None,
) -> dict:
    record: dict = {"seed": seed}
    if dataset is not None:
        record["dataset_hash"] = dataset_hash(dataset)
    if catalog_version is not None:
        record["catalog_version"] = catalog_version
    if method is not None:
        record["method"] = method
    return record


def save_report(path: str | Path, kind: str, payload: dict, prov: dict) -> None:
    document = {"kind": kind, "provenance": prov, "report": payload}
    Path(path).write_text(
        json.dumps(document, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def pr_curve_csv(points: Sequence[PRPoint], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["threshold", "tp", "fp", "fn", "precision", "recall"])
        for p in points:
            writer.writerow(
                [p.threshold, p.true_positive, p.false_positive,
                 p.false_negative, p.precision, p.recall]
            )


def learning_curve_csv(curve: LearningCurve, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["fraction", "mean_ap", "std_ap"]
            + [f"fold_{i}" for i in range(len(curve.values))]
        )
        for col, fraction in enumerate(curve.fractions):
            writer.writerow(
                [fraction, curve.means[col], curve.stds[col]]
                + [row[col] for row in curve.values]
            )
