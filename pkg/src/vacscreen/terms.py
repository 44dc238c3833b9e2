"""The forbidden-list baseline: a regex term catalog with exceptions.

Each search term is a case-insensitive regular expression, word-boundary
anchored, with optional exception patterns; an exception match anywhere in
the sentence suppresses that term's flag. A sentence is baseline-flagged
when at least one term matches unsuppressed.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Sentence
from .errors import CatalogError, ConfigError, DataError

_LEFT_ANCHORS = ("\\b", "^", "\\A")
_RIGHT_ANCHORS = ("\\b", "$", "\\Z")
_FLAGS = re.IGNORECASE | re.UNICODE


@dataclass(frozen=True)
class SearchTerm:
    """One potentially discriminating term with its exception patterns."""

    id: str
    label: str
    pattern: str
    exceptions: tuple[str, ...] = ()
    group: str = "other"
    translation: str | None = None


@dataclass(frozen=True)
class TermMatch:
    """An occurrence of a term inside one sentence."""

    sentence_id: str
    term_id: str
    span: tuple[int, int]
    suppressed: bool

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "term_id": self.term_id,
            "span": [self.span[0], self.span[1]],
            "suppressed": self.suppressed,
        }


def _anchor(pattern: str) -> str:
    left = "" if pattern.startswith(_LEFT_ANCHORS) else "\\b"
    right = "" if pattern.endswith(_RIGHT_ANCHORS) else "\\b"
    return f"{left}(?:{pattern}){right}"


def _compile(pattern: str, term_id: str, what: str) -> re.Pattern:
    # Compile the raw pattern first so error positions refer to the source
    # the user wrote, not the anchored wrapper.
    try:
        re.compile(pattern, _FLAGS)
    except re.error as exc:
        raise CatalogError(
            f"term {term_id!r}: invalid {what} {pattern!r} at position {exc.pos}: {exc.msg}"
        ) from exc
    return re.compile(_anchor(pattern), _FLAGS)


class TermCatalog:
    """An immutable, compiled term catalog.

    Terms are stored in canonical (id-sorted) order so scan results do not
    depend on the order a catalog file happens to list its terms.
    """

    def __init__(self, terms: Sequence[SearchTerm], version: str = "unversioned"):
        if not terms:
            raise ConfigError("catalog contains no terms")
        ids = [t.id for t in terms]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise CatalogError(f"duplicate term ids in catalog: {dupes}")
        self.terms: tuple[SearchTerm, ...] = tuple(sorted(terms, key=lambda t: t.id))
        self.version = version
        self._regexes: list[re.Pattern] = []
        self._exceptions: list[tuple[re.Pattern, ...]] = []
        for term in self.terms:
            self._regexes.append(_compile(term.pattern, term.id, "pattern"))
            self._exceptions.append(
                tuple(_compile(e, term.id, "exception") for e in term.exceptions)
            )

    @property
    def groups(self) -> list[str]:
        """Group tags in order of first appearance."""
        seen: list[str] = []
        for term in self.terms:
            if term.group not in seen:
                seen.append(term.group)
        return seen

    def __len__(self) -> int:
        return len(self.terms)


def compile_catalog(source: str | Path | Mapping) -> TermCatalog:
    """Build a catalog from a JSON file or an already-parsed mapping."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CatalogError(f"{path.name}: invalid JSON ({exc.msg})") from exc
    else:
        data = source
    if not isinstance(data, Mapping) or "terms" not in data:
        raise CatalogError("catalog must be an object with a 'terms' list")
    terms = []
    for i, raw in enumerate(data["terms"]):
        try:
            terms.append(
                SearchTerm(
                    id=raw["id"],
                    label=raw.get("label", raw["id"]),
                    pattern=raw["pattern"],
                    exceptions=tuple(raw.get("exceptions", ())),
                    group=raw.get("group", "other"),
                    translation=raw.get("translation"),
                )
            )
        except (KeyError, TypeError) as exc:
            raise CatalogError(f"term entry {i} is malformed: {exc}") from exc
    return TermCatalog(terms, version=str(data.get("version", "unversioned")))


def default_catalog() -> TermCatalog:
    """The catalog shipped with the package (Dutch gender terms)."""
    raw = resources.files("vacscreen.data").joinpath("default_catalog.json")
    return compile_catalog(json.loads(raw.read_text(encoding="utf-8")))


def scan_sentence(sentence: Sentence, catalog: TermCatalog) -> list[TermMatch]:
    """All term occurrences in one sentence.

    Per term, occurrences are the non-overlapping leftmost matches; the
    ``suppressed`` flag is set when any exception of that term matches
    anywhere in the sentence. Output is ordered left-to-right, longest
    match first, with remaining ties broken by canonical catalog order.
    """
    text = sentence.text
    keyed: list[tuple[int, int, int, TermMatch]] = []
    for idx, term in enumerate(catalog.terms):
        occurrences = list(catalog._regexes[idx].finditer(text))
        if not occurrences:
            continue
        suppressed = any(exc.search(text) for exc in catalog._exceptions[idx])
        for match in occurrences:
            span = (match.start(), match.end())
            keyed.append(
                (
                    span[0],
                    -(span[1] - span[0]),
                    idx,
                    TermMatch(sentence.id, term.id, span, suppressed),
                )
            )
    keyed.sort(key=lambda item: item[:3])
    return [item[3] for item in keyed]


def baseline_flag(sentence: Sentence, catalog: TermCatalog) -> bool:
    """True iff at least one term matches without suppression."""
    return any(not m.suppressed for m in scan_sentence(sentence, catalog))


def primary_match(sentence: Sentence, catalog: TermCatalog) -> TermMatch | None:
    """The match that attributes a flagged sentence to one term group.

    Longest match wins; ties go to the leftmost start, then canonical
    catalog order. Suppressed matches never win.
    """
    best = None
    best_key = None
    for pos, match in enumerate(scan_sentence(sentence, catalog)):
        if match.suppressed:
            continue
        key = (-(match.span[1] - match.span[0]), match.span[0], pos)
        if best_key is None or key < best_key:
            best, best_key = match, key
    return best


def term_group(sentence: Sentence, catalog: TermCatalog) -> str | None:
    match = primary_match(sentence, catalog)
    if match is None:
        return None
    by_id = {t.id: t.group for t in catalog.terms}
    return by_id[match.term_id]


@dataclass(frozen=True)
class TermGroupStats:
    group: str
    frequency: int
    pct_hsd: float


@dataclass(frozen=True)
class TermFrequencyReport:
    rows: tuple[TermGroupStats, ...]
    total_frequency: int
    total_pct_hsd: float

    def to_dict(self) -> dict:
        return {
            "rows": [
                {"group": r.group, "frequency": r.frequency, "pct_hsd": r.pct_hsd}
                for r in self.rows
            ],
            "total": {
                "frequency": self.total_frequency,
                "pct_hsd": self.total_pct_hsd,
            },
        }


def term_frequency_report(
    sentences: Sequence[Sentence],
    labels: Sequence[bool],
    catalog: TermCatalog,
) -> TermFrequencyReport:
    """Per-group counts of flagged sentences and their HSD fraction.

    Each flagged sentence is attributed to exactly one group via its
    primary match, so the group frequencies sum to the totals row.
    """
    if len(sentences) != len(labels):
        raise DataError(
            f"labels misaligned: {len(sentences)} sentences vs {len(labels)} labels"
        )
    group_of = {t.id: t.group for t in catalog.terms}
    freq: dict[str, int] = {g: 0 for g in catalog.groups}
    positives: dict[str, int] = {g: 0 for g in catalog.groups}
    for sentence, label in zip(sentences, labels):
        match = primary_match(sentence, catalog)
        if match is None:
            continue
        group = group_of[match.term_id]
        freq[group] += 1
        if label:
            positives[group] += 1
    rows = tuple(
        TermGroupStats(
            group=g,
            frequency=freq[g],
            pct_hsd=(positives[g] / freq[g]) if freq[g] else 0.0,
        )
        for g in catalog.groups
    )
    total = sum(freq.values())
    total_pos = sum(positives.values())
    return TermFrequencyReport(
        rows=rows,
        total_frequency=total,
        total_pct_hsd=(total_pos / total) if total else 0.0,
    )


def write_matches_jsonl(matches: Iterable[TermMatch], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for match in matches:
            handle.write(json.dumps(match.to_dict(), ensure_ascii=False) + "\n")
