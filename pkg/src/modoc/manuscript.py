"""Span-structured manuscripts with provenance and references.

Every run of text in a manuscript is a span that knows where it came from:
typed by the user, extracted verbatim from a source unit, or produced by a
generation provider (unverified until a confirmed check upgrades it). The
ethics report is computed from exactly this structure, so provenance
boundaries are never merged away.
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .corpus import UnitAddress
from .errors import (
    NotGenerated,
    PositionOutOfRange,
    StorageFailure,
    UnconfirmedCheck,
    UnknownManuscript,
    UnknownRequestDigest,
)
from .generation import AuditLog, CITATION_MARKER, GenerationResult

FORMAT_VERSION = 1
EXCERPT_LIMIT = 120


class ProvenanceKind(str, Enum):
    USER_TYPED = "user_typed"
    EXTRACTED = "extracted"
    GENERATED_UNVERIFIED = "generated_unverified"
    GENERATED_VERIFIED = "generated_verified"


class CheckMethod(str, Enum):
    ALIGNMENT = "alignment"
    DISCOVERY = "discovery"


@dataclass(frozen=True)
class CheckRecord:
    method: CheckMethod
    evidence: tuple[tuple[str | UnitAddress, float], ...]
    user_confirmed: bool
    checked_at: str

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "evidence": [
                [ref.to_dict() if isinstance(ref, UnitAddress) else ref, score]
                for ref, score in self.evidence
            ],
            "user_confirmed": self.user_confirmed,
            "checked_at": self.checked_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CheckRecord":
        evidence = tuple(
            (UnitAddress.from_dict(ref) if isinstance(ref, dict) else ref, float(score))
            for ref, score in data["evidence"]
        )
        return cls(
            method=CheckMethod(data["method"]),
            evidence=evidence,
            user_confirmed=bool(data["user_confirmed"]),
            checked_at=data["checked_at"],
        )


@dataclass(frozen=True)
class Provenance:
    """Tagged origin of a span; generated kinds carry their audit digest."""

    kind: ProvenanceKind
    source: UnitAddress | None = None
    request_digest: str | None = None
    provider_id: str | None = None
    checks: tuple[CheckRecord, ...] = ()

    @classmethod
    def user_typed(cls) -> "Provenance":
        return cls(kind=ProvenanceKind.USER_TYPED)

    @classmethod
    def extracted(cls, source: UnitAddress) -> "Provenance":
        return cls(kind=ProvenanceKind.EXTRACTED, source=source)

    @classmethod
    def generated(cls, request_digest: str, provider_id: str) -> "Provenance":
        return cls(
            kind=ProvenanceKind.GENERATED_UNVERIFIED,
            request_digest=request_digest,
            provider_id=provider_id,
        )

    @property
    def is_generated(self) -> bool:
        return self.kind in (
            ProvenanceKind.GENERATED_UNVERIFIED,
            ProvenanceKind.GENERATED_VERIFIED,
        )

    def to_dict(self) -> dict:
        data: dict = {"kind": self.kind.value}
        if self.source is not None:
            data["source"] = self.source.to_dict()
        if self.request_digest is not None:
            data["request_digest"] = self.request_digest
        if self.provider_id is not None:
            data["provider_id"] = self.provider_id
        if self.checks:
            data["checks"] = [c.to_dict() for c in self.checks]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Provenance":
        return cls(
            kind=ProvenanceKind(data["kind"]),
            source=UnitAddress.from_dict(data["source"]) if "source" in data else None,
            request_digest=data.get("request_digest"),
            provider_id=data.get("provider_id"),
            checks=tuple(CheckRecord.from_dict(c) for c in data.get("checks", [])),
        )


@dataclass(frozen=True)
class ManuscriptSpan:
    text: str
    provenance: Provenance
    citation_marker: int | None = None
    created_at: str = ""

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "provenance": self.provenance.to_dict(),
            "citation_marker": self.citation_marker,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ManuscriptSpan":
        return cls(
            text=data["text"],
            provenance=Provenance.from_dict(data["provenance"]),
            citation_marker=data.get("citation_marker"),
            created_at=data.get("created_at", ""),
        )


@dataclass(frozen=True)
class ReferenceEntry:
    number: int
    doc_id: str
    title: str
    authors: tuple[str, ...]
    venue: str
    year: int | None

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "doc_id": self.doc_id,
            "metadata": {
                "title": self.title,
                "authors": [{"full_name": a} for a in self.authors],
                "venue": self.venue,
                "year": self.year,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReferenceEntry":
        meta = data["metadata"]
        return cls(
            number=int(data["number"]),
            doc_id=data["doc_id"],
            title=meta["title"],
            authors=tuple(a["full_name"] for a in meta["authors"]),
            venue=meta["venue"],
            year=meta["year"],
        )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Manuscript:
    manuscript_id: str
    title: str = "Untitled"
    spans: list[ManuscriptSpan] = field(default_factory=list)
    references: list[ReferenceEntry] = field(default_factory=list)
    workflow_graph_ref: str | None = None
    updated_at: str = field(default_factory=_now)

    def full_text(self) -> str:
        return "".join(span.text for span in self.spans)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "manuscript_id": self.manuscript_id,
            "title": self.title,
            "spans": [s.to_dict() for s in self.spans],
            "references": [r.to_dict() for r in self.references],
            "workflow_graph_ref": self.workflow_graph_ref,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Manuscript":
        return cls(
            manuscript_id=data["manuscript_id"],
            title=data["title"],
            spans=[ManuscriptSpan.from_dict(s) for s in data["spans"]],
            references=[ReferenceEntry.from_dict(r) for r in data["references"]],
            workflow_graph_ref=data.get("workflow_graph_ref"),
            updated_at=data["updated_at"],
        )


def _mergeable(a: ManuscriptSpan, b: ManuscriptSpan) -> bool:
    return (
        a.provenance.kind is ProvenanceKind.USER_TYPED
        and b.provenance.kind is ProvenanceKind.USER_TYPED
        and a.citation_marker is None
        and b.citation_marker is None
    )


def _merge_around(ms: Manuscript, position: int) -> None:
    """Collapse the inserted span into adjacent plain user-typed spans."""
    if position + 1 < len(ms.spans) and _mergeable(ms.spans[position], ms.spans[position + 1]):
        ms.spans[position] = replace(
            ms.spans[position], text=ms.spans[position].text + ms.spans[position + 1].text
        )
        del ms.spans[position + 1]
    if position > 0 and _mergeable(ms.spans[position - 1], ms.spans[position]):
        ms.spans[position - 1] = replace(
            ms.spans[position - 1],
            text=ms.spans[position - 1].text + ms.spans[position].text,
        )
        del ms.spans[position]


def insert_span(
    ms: Manuscript,
    position: int,
    text: str,
    provenance: Provenance,
    audit: AuditLog | None = None,
) -> Manuscript:
    """Insert a span at a span-list position.

    Generated provenance must name a digest present in the audit log;
    adjacent plain user-typed spans merge, any other neighbour pair keeps
    its provenance boundary.
    """
    if not 0 <= position <= len(ms.spans):
        raise PositionOutOfRange(
            f"span position {position} outside [0, {len(ms.spans)}]", position=position
        )
    if not text:
        raise PositionOutOfRange("span text must be non-empty", position=position)
    if provenance.is_generated:
        if audit is None or provenance.request_digest not in audit:
            raise UnknownRequestDigest(
                f"no audit record for digest {provenance.request_digest!r}",
                request_digest=provenance.request_digest,
            )
    ms.spans.insert(position, ManuscriptSpan(text=text, provenance=provenance, created_at=_now()))
    _merge_around(ms, position)
    ms.updated_at = _now()
    return ms


def _ensure_reference(ms: Manuscript, doc_id: str, metadata: dict) -> ReferenceEntry:
    """Reference entry for a document, appended with the next number on the
    first citation (one entry per doc_id)."""
    entry = next((r for r in ms.references if r.doc_id == doc_id), None)
    if entry is None:
        entry = ReferenceEntry(
            number=len(ms.references) + 1,
            doc_id=doc_id,
            title=metadata.get("title", ""),
            authors=tuple(
                a["full_name"] if isinstance(a, dict) else a for a in metadata.get("authors", ())
            ),
            venue=metadata.get("venue", ""),
            year=metadata.get("year"),
        )
        ms.references.append(entry)
    return entry


def cite(ms: Manuscript, position: int, doc_id: str, metadata: dict) -> Manuscript:
    """Insert a numbered citation marker; the first citation of a document
    appends its reference entry, later citations reuse the number."""
    if not 0 <= position <= len(ms.spans):
        raise PositionOutOfRange(
            f"span position {position} outside [0, {len(ms.spans)}]", position=position
        )
    entry = _ensure_reference(ms, doc_id, metadata)
    marker = ManuscriptSpan(
        text=f"[{entry.number}]",
        provenance=Provenance.user_typed(),
        citation_marker=entry.number,
        created_at=_now(),
    )
    ms.spans.insert(position, marker)
    ms.updated_at = _now()
    return ms


def insert_generated(
    ms: Manuscript,
    position: int,
    result: GenerationResult,
    audit: AuditLog,
    target_doc_id: str | None = None,
    target_metadata: dict | None = None,
) -> Manuscript:
    """Adopt a generation result into the manuscript as an unverified span.

    Citation placeholders are rewritten to the numbered marker of the target
    document, recording the reference like any manual citation.
    """
    text = result.text
    if CITATION_MARKER in text and target_doc_id is not None:
        entry = _ensure_reference(ms, target_doc_id, target_metadata or {})
        text = text.replace(CITATION_MARKER, f"[{entry.number}]")
    return insert_span(
        ms,
        position,
        text,
        Provenance.generated(result.request_digest, result.provider_id),
        audit=audit,
    )


def verify_span(ms: Manuscript, span_idx: int, check: CheckRecord) -> Manuscript:
    """Upgrade a generated-unverified span with a confirmed check; further
    confirmed checks accumulate on an already-verified span."""
    if not 0 <= span_idx < len(ms.spans):
        raise PositionOutOfRange(
            f"span index {span_idx} outside [0, {len(ms.spans)})", position=span_idx
        )
    if not check.user_confirmed or not check.evidence:
        raise UnconfirmedCheck("verification needs user confirmation and at least one evidence item")
    span = ms.spans[span_idx]
    if not span.provenance.is_generated:
        raise NotGenerated(f"span {span_idx} provenance is {span.provenance.kind.value}")
    upgraded = replace(
        span.provenance,
        kind=ProvenanceKind.GENERATED_VERIFIED,
        checks=span.provenance.checks + (check,),
    )
    ms.spans[span_idx] = replace(span, provenance=upgraded)
    ms.updated_at = _now()
    return ms


def edit_span(ms: Manuscript, span_idx: int, text: str) -> Manuscript:
    """Replace a span's text; editing generated text demotes the span back to
    unverified, the strictest reading of check-before-adopt."""
    if not 0 <= span_idx < len(ms.spans):
        raise PositionOutOfRange(
            f"span index {span_idx} outside [0, {len(ms.spans)})", position=span_idx
        )
    if not text:
        raise PositionOutOfRange("span text must be non-empty", position=span_idx)
    span = ms.spans[span_idx]
    provenance = span.provenance
    if provenance.kind is ProvenanceKind.GENERATED_VERIFIED:
        provenance = replace(provenance, kind=ProvenanceKind.GENERATED_UNVERIFIED, checks=())
    ms.spans[span_idx] = replace(span, text=text, provenance=provenance)
    ms.updated_at = _now()
    return ms


def ethics_report(ms: Manuscript, now: datetime | None = None) -> dict:
    """List every generated-but-unchecked span; clean means there are none."""
    now = now or datetime.now(timezone.utc)
    findings = []
    counts = {kind.value: 0 for kind in ProvenanceKind}
    for idx, span in enumerate(ms.spans):
        counts[span.provenance.kind.value] += 1
        if span.provenance.kind is not ProvenanceKind.GENERATED_UNVERIFIED:
            continue
        age_seconds = None
        if span.created_at:
            created = datetime.fromisoformat(span.created_at)
            age_seconds = max((now - created).total_seconds(), 0.0)
        findings.append(
            {
                "span_idx": idx,
                "excerpt": span.text[:EXCERPT_LIMIT],
                "provider_id": span.provenance.provider_id,
                "request_digest": span.provenance.request_digest,
                "inserted_at": span.created_at,
                "age_seconds": age_seconds,
            }
        )
    return {
        "manuscript_id": ms.manuscript_id,
        "clean": not findings,
        "findings": findings,
        "counts": counts,
        "policy": "edited generated spans demote to unverified",
    }


class ExportFormat(str, Enum):
    BIBTEX = "bibtex"
    MLA = "mla"


def _invert_name(full_name: str) -> str:
    parts = full_name.split()
    if len(parts) < 2:
        return full_name
    return f"{parts[-1]}, {' '.join(parts[:-1])}"


def export_reference(entry: ReferenceEntry, fmt: ExportFormat) -> str:
    year = str(entry.year) if entry.year is not None else "n.d."
    if fmt is ExportFormat.BIBTEX:
        return (
            f"@article{{{entry.doc_id},\n"
            f"  title={{{entry.title}}},\n"
            f"  author={{{' and '.join(entry.authors)}}},\n"
            f"  journal={{{entry.venue}}},\n"
            f"  year={{{year}}}\n"
            f"}}"
        )
    names = _invert_name(entry.authors[0]) if entry.authors else ""
    for extra in entry.authors[1:]:
        names += f", and {extra}"
    ending = year if year.endswith(".") else year + "."
    return f'{names}. "{entry.title}." {entry.venue}, {ending}'


class ManuscriptStore:
    """One JSON file per manuscript under a data directory.

    Saves are atomic (write-temp-then-rename) and serialized per manuscript
    id; reads are unrestricted.
    """

    def __init__(self, data_dir: str | Path) -> None:
        self.root = Path(data_dir) / "manuscripts"
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, manuscript_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(manuscript_id, threading.Lock())

    def _path(self, manuscript_id: str) -> Path:
        if not re.fullmatch(r"[A-Za-z0-9._-]+", manuscript_id):
            raise UnknownManuscript(
                f"invalid manuscript id {manuscript_id!r}", manuscript_id=manuscript_id
            )
        return self.root / f"{manuscript_id}.json"

    def new(self, title: str = "Untitled", manuscript_id: str | None = None) -> Manuscript:
        ms = Manuscript(manuscript_id=manuscript_id or uuid.uuid4().hex, title=title)
        self.save(ms)
        return ms

    def save(self, ms: Manuscript) -> None:
        path = self._path(ms.manuscript_id)
        payload = json.dumps(ms.to_dict(), ensure_ascii=False, indent=2)
        with self._lock_for(ms.manuscript_id):
            tmp = path.with_suffix(".json.tmp")
            try:
                tmp.write_text(payload, encoding="utf-8")
                os.replace(tmp, path)
            except OSError as exc:
                raise StorageFailure(f"cannot persist manuscript {ms.manuscript_id!r}: {exc}") from exc

    def load(self, manuscript_id: str) -> Manuscript:
        path = self._path(manuscript_id)
        if not path.exists():
            raise UnknownManuscript(
                f"no manuscript with id {manuscript_id!r}", manuscript_id=manuscript_id
            )
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise StorageFailure(f"cannot load manuscript {manuscript_id!r}: {exc}") from exc
        return Manuscript.from_dict(data)

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))

    def delete(self, manuscript_id: str) -> None:
        path = self._path(manuscript_id)
        if not path.exists():
            raise UnknownManuscript(
                f"no manuscript with id {manuscript_id!r}", manuscript_id=manuscript_id
            )
        path.unlink()
