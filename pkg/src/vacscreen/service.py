"""HTTP service for the annotation and triage workbench.

Serves annotation queues in plan order and a score-ranked triage queue,
accepts label submissions over a durable append-only log, and exposes
reports and per-term stats. Label writes hit disk (flush + fsync) before
they are acknowledged.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .annotate import AnnotationLabel, AnnotationRecord, AssignmentPlan
from .corpus import Sentence, read_sentences_jsonl
from .errors import ConfigError
from .terms import TermCatalog, default_catalog, compile_catalog, primary_match, scan_sentence

SOFT_TIMER_SECONDS = 30  # surfaced to the UI as a hint, never enforced


@dataclass
class ServiceConfig:
    sentences_path: str
    data_dir: str
    roster: dict[str, str]  # annotator id -> bearer token
    catalog_path: str | None = None
    plan_path: str | None = None
    scores_path: str | None = None
    reports_dir: str | None = None
    host: str = "127.0.0.1"
    port: int = 8765

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if "serve" in data and "sentences" not in data:
            data = data["serve"]
        try:
            return cls(
                sentences_path=data["sentences"],
                data_dir=data["data_dir"],
                roster=dict(data["roster"]),
                catalog_path=data.get("catalog"),
                plan_path=data.get("plan"),
                scores_path=data.get("scores"),
                reports_dir=data.get("reports_dir"),
                host=data.get("host", "127.0.0.1"),
                port=int(data.get("port", 8765)),
            )
        except KeyError as exc:
            raise ConfigError(f"service config missing key {exc}") from exc


class LabelStore:
    """Append-only JSONL label log with snapshot compaction.

    Keeps the full audit history; the current state is last-write-wins per
    (sentence, annotator).
    """

    def __init__(self, data_dir: str | Path, compact_every: int = 500):
        self.dir = Path(data_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.dir / "labels.log.jsonl"
        self.snapshot_path = self.dir / "labels.snapshot.json"
        self.history: list[dict] = []
        self.current: dict[tuple[str, str], dict] = {}
        self._lock = threading.Lock()
        self._compact_every = compact_every
        self._appends_since_snapshot = 0
        self._load()

    def _load(self) -> None:
        if self.snapshot_path.exists():
            snapshot = json.loads(self.snapshot_path.read_text(encoding="utf-8"))
            for record in snapshot.get("history", []):
                self._apply(record)
        if self.log_path.exists():
            with self.log_path.open(encoding="utf-8") as handle:
                for raw in handle:
                    if raw.strip():
                        self._apply(json.loads(raw))

    def _apply(self, record: dict) -> None:
        self.history.append(record)
        self.current[(record["sentence_id"], record["annotator_id"])] = record

    def submit(self, record: AnnotationRecord) -> dict:
        data = record.to_dict()
        with self._lock:
            with self.log_path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(data, ensure_ascii=False) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            self._apply(data)
            self._appends_since_snapshot += 1
            if self._appends_since_snapshot >= self._compact_every:
                self._compact_locked()
        return data

    def compact(self) -> None:
        """Fold the log into the snapshot (history preserved)."""
        with self._lock:
            self._compact_locked()

    def _compact_locked(self) -> None:
        tmp = self.snapshot_path.with_suffix(".tmp")
        tmp.write_text(
            json.dumps({"history": self.history}, ensure_ascii=False),
            encoding="utf-8",
        )
        tmp.replace(self.snapshot_path)
        self.log_path.write_text("", encoding="utf-8")
        self._appends_since_snapshot = 0

    def labels_for(self, sentence_id: str | None = None,
                   annotator_id: str | None = None) -> list[dict]:
        records = list(self.current.values())
        if sentence_id is not None:
            records = [r for r in records if r["sentence_id"] == sentence_id]
        if annotator_id is not None:
            records = [r for r in records if r["annotator_id"] == annotator_id]
        return sorted(records, key=lambda r: (r["sentence_id"], r["annotator_id"]))

    def has_label(self, sentence_id: str, annotator_id: str) -> bool:
        return (sentence_id, annotator_id) in self.current


class LabelSubmission(BaseModel):
    sentence_id: str
    label: str
    client_timestamp: str = ""


def _corpus_hash(sentences: list[Sentence]) -> str:
    material = json.dumps(
        [[s.id, s.text] for s in sentences], ensure_ascii=False
    )
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def create_app(config: ServiceConfig) -> FastAPI:
    sentences = read_sentences_jsonl(config.sentences_path)
    by_id = {s.id: s for s in sentences}
    catalog = (
        compile_catalog(config.catalog_path)
        if config.catalog_path
        else default_catalog()
    )
    plan = (
        AssignmentPlan.from_dict(
            json.loads(Path(config.plan_path).read_text(encoding="utf-8"))
        )
        if config.plan_path
        else None
    )
    scores: dict[str, float] = {}
    if config.scores_path:
        with Path(config.scores_path).open(encoding="utf-8") as handle:
            for raw in handle:
                if raw.strip():
                    record = json.loads(raw)
                    scores[record["sentence_id"]] = float(record["score"])
    store = LabelStore(config.data_dir)
    reports_dir = Path(config.reports_dir) if config.reports_dir else Path(config.data_dir) / "reports"
    token_to_annotator = {token: a for a, token in config.roster.items()}
    meta = {
        "dataset_hash": _corpus_hash(sentences),
        "catalog_version": catalog.version,
    }

    app = FastAPI(title="vacscreen service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.meta = meta

    def authenticate(request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        annotator = token_to_annotator.get(header[7:].strip())
        if annotator is None:
            raise HTTPException(status_code=401, detail="unknown token")
        return annotator

    def envelope(data) -> dict:
        return {"meta": meta, "data": data}

    def queue_item(sentence: Sentence, kind: str, position: int) -> dict:
        matches = scan_sentence(sentence, catalog)
        return {
            "sentence_id": sentence.id,
            "text": sentence.text,
            "matches": [m.to_dict() for m in matches],
            "score": scores.get(sentence.id) if kind == "triage" else None,
            "kind": kind,
            "position": position,
            "soft_timer_seconds": SOFT_TIMER_SECONDS,
        }

    @app.get("/queue")
    def get_queue(
        annotator: str = Query(default=None),
        kind: str = Query(default="annotate"),
        limit: int = Query(default=20, ge=1, le=500),
        identity: str = Depends(authenticate),
    ):
        who = annotator or identity
        if who != identity:
            raise HTTPException(status_code=403, detail="token does not match annotator")
        if kind == "annotate":
            if plan is None:
                raise HTTPException(status_code=404, detail="no assignment plan loaded")
            ordered = plan.assignments_for(who)
            pending = [
                (pos, sid)
                for pos, sid in enumerate(ordered)
                if not store.has_label(sid, who) and sid in by_id
            ]
            items = [queue_item(by_id[sid], "annotate", pos) for pos, sid in pending[:limit]]
        elif kind == "triage":
            ranked = sorted(
                (sid for sid in scores if sid in by_id and not store.has_label(sid, who)),
                key=lambda sid: (-scores[sid], sid),
            )
            items = [
                queue_item(by_id[sid], "triage", pos)
                for pos, sid in enumerate(ranked[:limit])
            ]
        else:
            raise HTTPException(status_code=400, detail=f"unknown queue kind {kind!r}")
        return envelope({"kind": kind, "annotator": who, "items": items})

    @app.post("/labels")
    def post_label(submission: LabelSubmission, identity: str = Depends(authenticate)):
        if submission.sentence_id not in by_id:
            raise HTTPException(status_code=404, detail="unknown sentence id")
        try:
            label = AnnotationLabel.parse(submission.label)
        except Exception:
            raise HTTPException(
                status_code=422, detail=f"label must be one of yes/no/?, got {submission.label!r}"
            )
        record = AnnotationRecord(
            sentence_id=submission.sentence_id,
            annotator_id=identity,
            label=label,
            timestamp=submission.client_timestamp,
        )
        stored = store.submit(record)
        return envelope({"status": "ok", "record": stored})

    @app.get("/labels")
    def get_labels(
        sentence_id: Optional[str] = Query(default=None),
        annotator: Optional[str] = Query(default=None),
        history: bool = Query(default=False),
        identity: str = Depends(authenticate),
    ):
        if history:
            records = [
                r
                for r in store.history
                if (sentence_id is None or r["sentence_id"] == sentence_id)
                and (annotator is None or r["annotator_id"] == annotator)
            ]
        else:
            records = store.labels_for(sentence_id, annotator)
        return envelope({"records": records})

    @app.get("/sentences/{sentence_id}")
    def get_sentence(sentence_id: str, identity: str = Depends(authenticate)):
        sentence = by_id.get(sentence_id)
        if sentence is None:
            raise HTTPException(status_code=404, detail="unknown sentence id")
        return envelope(
            {
                "id": sentence.id,
                "vacancy_id": sentence.vacancy_id,
                "index": sentence.index,
                "text": sentence.text,
                "span": list(sentence.span),
                "matches": [m.to_dict() for m in scan_sentence(sentence, catalog)],
            }
        )

    @app.get("/reports/{kind}")
    def get_report(kind: str, identity: str = Depends(authenticate)):
        safe = "".join(c for c in kind if c.isalnum() or c in "-_")
        path = reports_dir / f"{safe}.json"
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"no report {kind!r}")
        return envelope(json.loads(path.read_text(encoding="utf-8")))

    @app.get("/stats")
    def get_stats(identity: str = Depends(authenticate)):
        group_of: dict[str, str] = {}
        term_to_group = {t.id: t.group for t in catalog.terms}
        for sentence in sentences:
            match = primary_match(sentence, catalog)
            if match is not None:
                group_of[sentence.id] = term_to_group[match.term_id]
        rows = []
        for group in catalog.groups:
            sids = [sid for sid, g in group_of.items() if g == group]
            labeled = {"yes": 0, "no": 0, "?": 0}
            for sid in sids:
                for record in store.labels_for(sentence_id=sid):
                    labeled[record["label"]] += 1
            decided = labeled["yes"] + labeled["no"]
            rows.append(
                {
                    "group": group,
                    "frequency": len(sids),
                    "labeled": sum(labeled.values()),
                    "yes": labeled["yes"],
                    "no": labeled["no"],
                    "unknown": labeled["?"],
                    "pct_hsd": (labeled["yes"] / decided) if decided else None,
                }
            )
        total_freq = sum(r["frequency"] for r in rows)
        total_yes = sum(r["yes"] for r in rows)
        total_decided = sum(r["yes"] + r["no"] for r in rows)
        return envelope(
            {
                "rows": rows,
                "total": {
                    "frequency": total_freq,
                    "pct_hsd": (total_yes / total_decided) if total_decided else None,
                },
            }
        )

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
