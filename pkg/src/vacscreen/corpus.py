"""Vacancy ingestion, sentence segmentation, and synthetic corpora.

Vacancies arrive as free text (JSONL or CSV); sentences are the unit of
annotation and classification, carrying exact character spans back into the
vacancy body. A deterministic synthetic generator stands in for the
non-public production corpus at desk scale.
"""

from __future__ import annotations

import csv
import json
import random
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import ConfigError, DataError, EmptyInputError, SchemaError

# Dutch abbreviations that must not terminate a sentence.
_ABBREVIATIONS = {
    "o.a.", "bijv.", "m/v", "b.v.", "ca.", "e.d.", "etc.", "evt.",
    "incl.", "excl.", "m.b.t.", "o.b.v.", "d.m.v.", "t/m", "nr.",
}

_TERMINATOR = re.compile(r"[.!?]")
_BLANK_LINE = re.compile(r"\n[ \t]*\n\s*")
_WORD = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class Vacancy:
    """One job posting: free text plus provenance."""

    id: str
    body: str
    source: str = ""
    posted_date: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise DataError("vacancy id must be non-empty")
        if not self.body:
            raise EmptyInputError(f"vacancy {self.id!r} has an empty body")


@dataclass(frozen=True)
class Sentence:
    """A segmentation unit with an exact [start, end) span into the body."""

    id: str
    vacancy_id: str
    index: int
    text: str
    span: tuple[int, int]

    def __post_init__(self) -> None:
        start, end = self.span
        if not (0 <= start < end):
            raise DataError(f"sentence {self.id!r} has an invalid span {self.span}")
        if not self.text.strip():
            raise DataError(f"sentence {self.id!r} is empty after trimming")


def nfc(text: str) -> str:
    """Normalize to Unicode NFC; keeps matching stable for Dutch diacritics."""
    return unicodedata.normalize("NFC", text)


def token_count(text: str) -> int:
    return len(_WORD.findall(text))


def is_annotatable(sentence: Sentence) -> bool:
    """Sentences shorter than two tokens stay in the corpus but are dropped
    from annotation and classification queues."""
    return token_count(sentence.text) >= 2


def segment_sentences(vacancy: Vacancy) -> list[Sentence]:
    """Split a vacancy body into sentences with exact spans.

    Boundaries are ``.``, ``!`` or ``?`` followed by whitespace or end of
    text, plus blank lines. A short list of Dutch abbreviations does not
    terminate. Deterministic; spans are ordered and non-overlapping, and
    ``body[start:end] == text`` for every sentence.
    """
    body = vacancy.body
    if not body.strip():
        raise EmptyInputError(f"vacancy {vacancy.id!r} has no text to segment")

    boundaries: list[int] = []
    for match in _BLANK_LINE.finditer(body):
        boundaries.append(match.start())
    for match in _TERMINATOR.finditer(body):
        end = match.end()
        if end < len(body) and not body[end].isspace():
            continue
        # The non-whitespace run ending at this terminator; abbreviations
        # like "o.a." keep the sentence open.
        run_start = end - 1
        while run_start > 0 and not body[run_start - 1].isspace():
            run_start -= 1
        if body[run_start:end].lower() in _ABBREVIATIONS:
            continue
        boundaries.append(end)
    boundaries.append(len(body))

    sentences: list[Sentence] = []
    cursor = 0
    for cut in sorted(set(boundaries)):
        raw = body[cursor:cut]
        start, end = cursor, cut
        while start < end and body[start].isspace():
            start += 1
        while end > start and body[end - 1].isspace():
            end -= 1
        cursor = cut
        if end <= start:
            continue
        index = len(sentences)
        sentences.append(
            Sentence(
                id=f"{vacancy.id}:s{index}",
                vacancy_id=vacancy.id,
                index=index,
                text=body[start:end],
                span=(start, end),
            )
        )
    return sentences


def _build_vacancy(record: dict, where: str, line: int) -> Vacancy:
    body = record.get("body")
    if not isinstance(body, str) or not body:
        raise SchemaError(f"{where}:{line}: missing or empty 'body'")
    vid = record.get("id")
    if vid is None:
        vid = f"{where}:{line}"
    elif not isinstance(vid, str) or not vid:
        raise SchemaError(f"{where}:{line}: 'id' must be a non-empty string")
    source = record.get("source") or ""
    posted = record.get("posted_date")
    return Vacancy(id=vid, body=nfc(body), source=str(source), posted_date=posted)


def ingest(path: str | Path, format: str | None = None) -> list[Vacancy]:
    """Load vacancies from a JSONL or CSV file.

    Ids are preserved when present and synthesized as ``<filename>:<line>``
    otherwise. Malformed records and duplicate ids are reported with their
    line numbers.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise ConfigError(f"unknown ingest format {format!r}")

    name = path.name
    vacancies: list[Vacancy] = []
    seen: dict[str, int] = {}

    def add(record: dict, line: int) -> None:
        vacancy = _build_vacancy(record, name, line)
        if vacancy.id in seen:
            raise DataError(
                f"{name}: duplicate vacancy id {vacancy.id!r} "
                f"on lines {seen[vacancy.id]} and {line}"
            )
        seen[vacancy.id] = line
        vacancies.append(vacancy)

    if format == "jsonl":
        with path.open(encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, start=1):
                if not raw.strip():
                    continue
                try:
                    record = json.loads(raw)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"{name}:{line_no}: invalid JSON ({exc.msg})") from exc
                if not isinstance(record, dict):
                    raise SchemaError(f"{name}:{line_no}: expected a JSON object")
                add(record, line_no)
    else:
        with path.open(encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            header = reader.fieldnames or []
            if "body" not in header:
                raise SchemaError(f"{name}: CSV header is missing required column 'body'")
            for record in reader:
                add({k: v for k, v in record.items() if v not in (None, "")},
                    reader.line_num)
    return vacancies


def write_sentences_jsonl(sentences: Iterable[Sentence], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for s in sentences:
            record = {
                "id": s.id,
                "vacancy_id": s.vacancy_id,
                "index": s.index,
                "text": s.text,
                "span": [s.span[0], s.span[1]],
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_sentences_jsonl(path: str | Path) -> list[Sentence]:
    path = Path(path)
    sentences = []
    with path.open(encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path.name}:{line_no}: invalid JSON ({exc.msg})") from exc
            try:
                sentences.append(
                    Sentence(
                        id=record["id"],
                        vacancy_id=record["vacancy_id"],
                        index=record["index"],
                        text=record["text"],
                        span=(record["span"][0], record["span"][1]),
                    )
                )
            except (KeyError, TypeError, IndexError) as exc:
                raise SchemaError(f"{path.name}:{line_no}: bad sentence record") from exc
    return sentences


# --------------------------------------------------------------------------
# Synthetic corpora
# --------------------------------------------------------------------------

# Surface forms paired with the catalog group they belong to. Every form is
# matched by the default catalog.
DEFAULT_SLOT_FILLERS: tuple[tuple[str, str], ...] = (
    ("man", "man(nen)"),
    ("mannen", "man(nen)"),
    ("vrouw", "vrouw(en)"),
    ("vrouwen", "vrouw(en)"),
    ("jongen", "jongen(s)"),
    ("jongens", "jongen(s)"),
    ("dame", "dame(s)"),
    ("dames", "dame(s)"),
    ("mannelijke kandidaat", "mannelijk(e)"),
    ("mannelijke collega", "mannelijk(e)"),
    ("vrouwelijke kandidaat", "vrouwelijk(e)"),
    ("vrouwelijke collega", "vrouwelijk(e)"),
    ("kerel", "informal"),
    ("vent", "informal"),
    ("gozer", "informal"),
    ("griet", "informal"),
    ("enthousiaste jongen", "other"),
    ("enthousiaste meid", "other"),
    ("jonge god", "other"),
    ("jonge godin", "other"),
)

# Discriminatory context: the term describes the requested candidate.
DEFAULT_POSITIVE_TEMPLATES: tuple[str, ...] = (
    "Wij zoeken een {term} voor ons team.",
    "Voor deze functie zoeken wij een {term} met ervaring.",
    "Het bedrijf heeft een sterke voorkeur voor een {term} in deze rol.",
    "Alleen een {term} komt in aanmerking voor deze vacature.",
    "Als {term} pas jij perfect binnen onze ploeg.",
    "Ben jij de {term} die ons magazijn komt versterken, reageer dan snel.",
)

# Non-discriminatory context: the term describes clientele or surroundings.
DEFAULT_NEGATIVE_TEMPLATES: tuple[str, ...] = (
    "Je begeleidt dagelijks een {term} binnen onze woongroep.",
    "Onze klanten zijn vooral {term} met een actieve levensstijl.",
    "De afdeling verkoopt kleding voor een {term} van elke leeftijd.",
    "Je geeft deskundig advies aan een {term} over ons assortiment.",
    "In deze wijk werk je veel samen met een {term} uit de buurt.",
    "Het programma richt zich op een {term} die van sport houdt.",
)

# Inclusive phrasing: catalog terms occur but their exceptions also match,
# so the baseline suppresses the flag.
DEFAULT_INCLUSIVE_TEMPLATES: tuple[str, ...] = (
    "Mannelijke en vrouwelijke kandidaten zijn even welkom in dit team.",
    "Wij verwelkomen iedere man of vrouw met interesse in dit vak.",
)


@dataclass(frozen=True)
class SyntheticTemplates:
    """Sentence templates with a ``{term}`` slot, one list per class."""

    positive: tuple[str, ...] = DEFAULT_POSITIVE_TEMPLATES
    negative: tuple[str, ...] = DEFAULT_NEGATIVE_TEMPLATES
    inclusive: tuple[str, ...] = DEFAULT_INCLUSIVE_TEMPLATES
    inclusive_rate: float = 0.03
    slot_fillers: tuple[tuple[str, str], ...] = DEFAULT_SLOT_FILLERS


@dataclass(frozen=True)
class SyntheticSpec:
    """Deterministic recipe for a desk-scale labeled corpus."""

    n_sentences: int
    planted_hsd_rate: float
    seed: int
    templates: SyntheticTemplates = field(default_factory=SyntheticTemplates)

    def __post_init__(self) -> None:
        if not 0.0 <= self.planted_hsd_rate <= 1.0:
            raise ConfigError(
                f"planted_hsd_rate must be in [0, 1], got {self.planted_hsd_rate}"
            )
        if self.n_sentences <= 0:
            raise ConfigError("n_sentences must be positive")
        if not self.templates.positive or not self.templates.negative:
            raise ConfigError("both template lists must be non-empty")
        if not self.templates.slot_fillers:
            raise ConfigError("slot_fillers must be non-empty")


def generate_synthetic(spec: SyntheticSpec) -> tuple[list[Sentence], list[bool]]:
    """Generate a labeled sentence corpus; a pure function of (spec, seed).

    Exactly ``round(n * rate)`` sentences are positive, so the gold-label
    prevalence equals ``round(n * rate) / n``. Every sentence contains one
    catalog term; a small inclusive share is suppressed by exceptions.
    """
    rng = random.Random(spec.seed)
    n = spec.n_sentences
    n_pos = round(n * spec.planted_hsd_rate)
    labels = [True] * n_pos + [False] * (n - n_pos)
    rng.shuffle(labels)

    t = spec.templates
    sentences: list[Sentence] = []
    for i, positive in enumerate(labels):
        if positive:
            template = rng.choice(t.positive)
        elif t.inclusive and rng.random() < t.inclusive_rate:
            template = rng.choice(t.inclusive)
        else:
            template = rng.choice(t.negative)
        surface, _group = rng.choice(t.slot_fillers)
        text = nfc(template.format(term=surface))
        sid = f"synth:{i:05d}"
        sentences.append(
            Sentence(id=sid, vacancy_id=sid, index=0, text=text, span=(0, len(text)))
        )
    return sentences, labels
