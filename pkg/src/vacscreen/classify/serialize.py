"""Versioned JSON model files.

Floats are serialized via their shortest round-tripping representation, so
a saved and reloaded model produces bit-identical scores.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import SchemaError
from .model import EnsembleParams, FeatureSpace, LogisticParams, TrainedModel
from .trees import Tree

FORMAT_VERSION = 1


def model_to_dict(model: TrainedModel) -> dict:
    params = model.params
    if isinstance(params, LogisticParams):
        payload = {
            "weights": params.weights.tolist(),
            "bias": params.bias,
        }
    else:
        payload = {
            "aggregation": params.aggregation,
            "base_raw": params.base_raw,
            "trees": [tree.to_dict() for tree in params.trees],
        }
    return {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "feature_space": {
            "kind": model.feature_space.kind,
            "dimension": model.feature_space.dimension,
            "fingerprint": model.feature_space.fingerprint,
        },
        "seed": model.seed,
        "hyperparameters": model.hyperparameters,
        "params": payload,
        "diagnostics": model.diagnostics,
    }


def model_from_dict(data: dict) -> TrainedModel:
    if data.get("format_version") != FORMAT_VERSION:
        raise SchemaError(
            f"unsupported model format version {data.get('format_version')!r}"
        )
    kind = data["kind"]
    payload = data["params"]
    if kind == "logistic":
        params = LogisticParams(
            weights=np.asarray(payload["weights"], dtype=np.float64),
            bias=float(payload["bias"]),
        )
    elif kind in ("gbt", "forest"):
        params = EnsembleParams(
            trees=[Tree.from_dict(t) for t in payload["trees"]],
            aggregation=payload["aggregation"],
            base_raw=float(payload.get("base_raw", 0.0)),
        )
    else:
        raise SchemaError(f"unknown model kind {kind!r}")
    fs = data["feature_space"]
    return TrainedModel(
        kind=kind,
        feature_space=FeatureSpace(
            kind=fs["kind"],
            dimension=int(fs["dimension"]),
            fingerprint=fs.get("fingerprint"),
        ),
        seed=int(data["seed"]),
        hyperparameters=dict(data["hyperparameters"]),
        params=params,
        diagnostics=dict(data.get("diagnostics", {})),
    )


def save_model(model: TrainedModel, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(model_to_dict(model), ensure_ascii=False), encoding="utf-8"
    )


def load_model(path: str | Path) -> TrainedModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{Path(path).name}: invalid model JSON ({exc.msg})") from exc
    return model_from_dict(data)
