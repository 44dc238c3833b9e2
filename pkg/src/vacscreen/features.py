"""Sentence representations: 1-2-gram counts, averaged word vectors, and
precomputed contextual vectors loaded from file.

Vocabularies are fitted on training data only; transforms are pure and
never see anything the fit did not.
"""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from .corpus import Sentence
from .errors import DataError, EmptyInputError, MissingVectorError, SchemaError

DEFAULT_MAX_FEATURES = 50_000


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    strip_punctuation: bool = True
    token_pattern: str = r"[^\W_]+"


_DEFAULT_CONFIG = TokenizerConfig()
_PUNCT_RUN = r"[^\w\s]+"


def tokenize(text: str, config: TokenizerConfig = _DEFAULT_CONFIG) -> list[str]:
    """Deterministic tokenization: NFC, optional lowercasing, word runs.

    With ``strip_punctuation=False`` punctuation runs are kept as tokens.
    """
    text = unicodedata.normalize("NFC", text)
    if config.lowercase:
        text = text.lower()
    pattern = config.token_pattern
    if not config.strip_punctuation:
        pattern = f"(?:{pattern})|(?:{_PUNCT_RUN})"
    return re.findall(pattern, text, re.UNICODE)


def _as_text(item: str | Sentence) -> str:
    return item.text if isinstance(item, Sentence) else item


def _ngrams(tokens: Sequence[str], lo: int, hi: int) -> Iterable[str]:
    for size in range(lo, hi + 1):
        for i in range(len(tokens) - size + 1):
            yield " ".join(tokens[i : i + size])


@dataclass(frozen=True)
class Vocabulary:
    """N-gram to column-index map fitted on training sentences."""

    entries: Mapping[str, int]
    ngram_range: tuple[int, int] = (1, 2)
    max_features: int | None = DEFAULT_MAX_FEATURES
    tokenizer: TokenizerConfig = _DEFAULT_CONFIG

    def __len__(self) -> int:
        return len(self.entries)

    def fingerprint(self) -> str:
        """Content hash used as the model feature-space descriptor."""
        material = json.dumps(
            [
                sorted(self.entries.items()),
                list(self.ngram_range),
                self.max_features,
            ],
            ensure_ascii=False,
        )
        return hashlib.sha256(material.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        return {
            "entries": dict(self.entries),
            "ngram_range": list(self.ngram_range),
            "max_features": self.max_features,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        return cls(
            entries=dict(data["entries"]),
            ngram_range=tuple(data["ngram_range"]),
            max_features=data.get("max_features"),
        )


def fit_vocabulary(
    train: Sequence[str | Sentence],
    ngram_range: tuple[int, int] = (1, 2),
    max_features: int | None = DEFAULT_MAX_FEATURES,
    tokenizer: TokenizerConfig = _DEFAULT_CONFIG,
) -> Vocabulary:
    """Collect every n-gram of the training sentences.

    When capped, the ``max_features`` most frequent n-grams are kept, ties
    broken lexicographically; column indices follow lexicographic order.
    """
    if not train:
        raise EmptyInputError("cannot fit a vocabulary on an empty training set")
    counts: dict[str, int] = {}
    for item in train:
        tokens = tokenize(_as_text(item), tokenizer)
        for gram in _ngrams(tokens, *ngram_range):
            counts[gram] = counts.get(gram, 0) + 1
    kept = sorted(counts)
    if max_features is not None and len(kept) > max_features:
        by_rank = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        kept = sorted(gram for gram, _ in by_rank[:max_features])
    return Vocabulary(
        entries={gram: i for i, gram in enumerate(kept)},
        ngram_range=ngram_range,
        max_features=max_features,
        tokenizer=tokenizer,
    )


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, count) pairs within a vocabulary's column space."""

    entries: tuple[tuple[int, int], ...]
    size: int

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.size)
        for idx, count in self.entries:
            out[idx] = count
        return out


def transform_bow(
    sentence: str | Sentence, vocabulary: Vocabulary
) -> SparseVector:
    """Counts of known n-grams; unseen n-grams are ignored."""
    tokens = tokenize(_as_text(sentence), vocabulary.tokenizer)
    counts: dict[int, int] = {}
    for gram in _ngrams(tokens, *vocabulary.ngram_range):
        idx = vocabulary.entries.get(gram)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    return SparseVector(
        entries=tuple(sorted(counts.items())), size=len(vocabulary)
    )


def transform_bow_matrix(
    sentences: Sequence[str | Sentence], vocabulary: Vocabulary
) -> sparse.csr_matrix:
    """Batch transform to a CSR matrix (rows align with ``sentences``)."""
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    for sentence in sentences:
        vec = transform_bow(sentence, vocabulary)
        for idx, count in vec.entries:
            indices.append(idx)
            data.append(count)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64), indices, indptr),
        shape=(len(sentences), len(vocabulary)),
    )


# --------------------------------------------------------------------------
# Word-embedding averages
# --------------------------------------------------------------------------


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.vectors)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load a text-format table: ``<count> <dim>`` header, then one
    ``<token> v1 .. v_dim`` line each. Duplicate tokens: last wins."""
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise SchemaError(f"{path.name}:1: header must be '<count> <dimension>'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise SchemaError(f"{path.name}:1: non-numeric header") from exc
        vectors: dict[str, np.ndarray] = {}
        for line_no, raw in enumerate(handle, start=2):
            if not raw.strip():
                continue
            parts = raw.rstrip("\n").split(" ")
            token = parts[0]
            values = parts[1:]
            if len(values) != dim:
                raise SchemaError(
                    f"{path.name}:{line_no}: expected {dim} values, got {len(values)}"
                )
            if token in vectors:
                warnings.warn(
                    f"{path.name}:{line_no}: duplicate token {token!r}; last wins"
                )
            vectors[token] = np.asarray([float(v) for v in values])
    if count != len(vectors):
        warnings.warn(
            f"{path.name}: header announced {count} tokens, found {len(vectors)}"
        )
    return EmbeddingTable(dimension=dim, vectors=vectors)


@dataclass(frozen=True)
class AveragedVector:
    values: np.ndarray
    all_oov: bool


def embed_average(
    sentence: str | Sentence,
    table: EmbeddingTable,
    tokenizer: TokenizerConfig = _DEFAULT_CONFIG,
) -> AveragedVector:
    """Arithmetic mean of the vectors of in-vocabulary tokens.

    Out-of-vocabulary tokens are skipped; a fully OOV sentence yields the
    zero vector with ``all_oov`` set so callers can filter.
    """
    tokens = tokenize(_as_text(sentence), tokenizer)
    hits = [table.vectors[t] for t in tokens if t in table.vectors]
    if not hits:
        return AveragedVector(np.zeros(table.dimension), all_oov=True)
    return AveragedVector(np.mean(hits, axis=0), all_oov=False)


def embed_average_matrix(
    sentences: Sequence[str | Sentence],
    table: EmbeddingTable,
    tokenizer: TokenizerConfig = _DEFAULT_CONFIG,
) -> tuple[np.ndarray, np.ndarray]:
    """Dense matrix of averages plus a boolean all-OOV row mask."""
    rows = np.zeros((len(sentences), table.dimension))
    oov = np.zeros(len(sentences), dtype=bool)
    for i, sentence in enumerate(sentences):
        avg = embed_average(sentence, table, tokenizer)
        rows[i] = avg.values
        oov[i] = avg.all_oov
    return rows, oov


# --------------------------------------------------------------------------
# Precomputed contextual vectors (consumed, never produced, by this repo)
# --------------------------------------------------------------------------


@dataclass
class ContextualEmbeddingSource:
    dimension: int
    vectors: dict[str, np.ndarray]
    provenance: str = ""


def load_contextual(path: str | Path) -> ContextualEmbeddingSource:
    """JSONL: a ``{"dimension": d}`` header record, then
    ``{"sentence_id": ..., "vector": [...]}`` records."""
    path = Path(path)
    dimension: int | None = None
    provenance = ""
    vectors: dict[str, np.ndarray] = {}
    with path.open(encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path.name}:{line_no}: invalid JSON ({exc.msg})") from exc
            if dimension is None:
                if "dimension" not in record:
                    raise SchemaError(
                        f"{path.name}:{line_no}: first record must carry 'dimension'"
                    )
                dimension = int(record["dimension"])
                provenance = str(record.get("provenance", ""))
                continue
            try:
                sid = record["sentence_id"]
                vec = np.asarray(record["vector"], dtype=np.float64)
            except (KeyError, TypeError) as exc:
                raise SchemaError(f"{path.name}:{line_no}: bad vector record") from exc
            if vec.shape != (dimension,):
                raise SchemaError(
                    f"{path.name}:{line_no}: vector has {vec.shape[0]} values, "
                    f"expected {dimension}"
                )
            vectors[sid] = vec
    if dimension is None:
        raise SchemaError(f"{path.name}: missing dimension header record")
    return ContextualEmbeddingSource(
        dimension=dimension, vectors=vectors, provenance=provenance
    )


def lookup_contextual(
    sentence_id: str, source: ContextualEmbeddingSource
) -> np.ndarray:
    vector = source.vectors.get(sentence_id)
    if vector is None:
        raise MissingVectorError(
            f"no contextual vector for sentence {sentence_id!r}"
        )
    return vector


def contextual_matrix(
    sentence_ids: Sequence[str], source: ContextualEmbeddingSource
) -> np.ndarray:
    return np.stack([lookup_contextual(sid, source) for sid in sentence_ids])
