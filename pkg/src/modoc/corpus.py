"""Document corpus: ingestion, validation, and unit addressing.

The corpus file is UTF-8 JSON lines, one document per line, with sentences
pre-split (``sections`` is a list of ``{title, paragraphs}`` where each
paragraph is a list of sentence strings). Sentence segmentation quality is
deliberately kept out of the storage format; the regex splitter below is
offered only on the CLI import path and never applied silently.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import DuplicateId, EmptyCorpus, FileUnreadable, IndexOutOfRange, UnknownDocument

YEAR_MIN = 1800
YEAR_MAX = 2100


class Granularity(str, Enum):
    SENTENCE = "sentence"
    PARAGRAPH = "paragraph"
    SECTION = "section"
    DOCUMENT = "document"


@dataclass(frozen=True)
class Section:
    title: str
    paragraphs: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    authors: tuple[str, ...]
    venue: str
    year: int | None
    abstract: str
    sections: tuple[Section, ...]

    def body_sentences(self) -> list[str]:
        return [s for sec in self.sections for para in sec.paragraphs for s in para]


@dataclass(frozen=True)
class UnitAddress:
    """Address of a text unit inside a document, down to its granularity.

    Index fields below the granularity level stay None.
    """

    doc_id: str
    granularity: Granularity
    section_idx: int | None = None
    paragraph_idx: int | None = None
    sentence_idx: int | None = None

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "granularity": self.granularity.value,
            "section_idx": self.section_idx,
            "paragraph_idx": self.paragraph_idx,
            "sentence_idx": self.sentence_idx,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UnitAddress":
        return cls(
            doc_id=data["doc_id"],
            granularity=Granularity(data["granularity"]),
            section_idx=data.get("section_idx"),
            paragraph_idx=data.get("paragraph_idx"),
            sentence_idx=data.get("sentence_idx"),
        )


@dataclass
class Corpus:
    """Immutable after ingestion; iteration is always sorted by doc id."""

    documents: dict[str, Document]
    source_path: str = ""
    skipped: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(sorted(self.documents.values(), key=lambda d: d.id))

    def get(self, doc_id: str) -> Document:
        doc = self.documents.get(doc_id)
        if doc is None:
            raise UnknownDocument(f"no document with id {doc_id!r}", doc_id=doc_id)
        return doc


def _validate_record(record: dict) -> Document:
    """Raise ValueError describing the first violated field."""
    if not isinstance(record, dict):
        raise ValueError("record is not an object")

    doc_id = record.get("id")
    if not isinstance(doc_id, str) or not doc_id.strip():
        raise ValueError("id missing or empty")

    title = record.get("title")
    if not isinstance(title, str):
        raise ValueError("title missing")

    authors_raw = record.get("authors")
    if not isinstance(authors_raw, list):
        raise ValueError("authors missing")
    authors = []
    for a in authors_raw:
        if not isinstance(a, dict) or not isinstance(a.get("full_name"), str):
            raise ValueError("author entry missing full_name")
        authors.append(a["full_name"])

    venue = record.get("venue")
    if not isinstance(venue, str):
        raise ValueError("venue missing")

    year = record.get("year")
    if year is not None:
        if not isinstance(year, int) or isinstance(year, bool):
            raise ValueError("year is not an integer")
        if not YEAR_MIN <= year <= YEAR_MAX:
            raise ValueError(f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")

    abstract = record.get("abstract")
    if not isinstance(abstract, str):
        raise ValueError("abstract missing")

    sections_raw = record.get("sections")
    if not isinstance(sections_raw, list):
        raise ValueError("sections missing")
    sections = []
    for si, sec in enumerate(sections_raw):
        if not isinstance(sec, dict) or not isinstance(sec.get("title"), str):
            raise ValueError(f"section {si} missing title")
        paras_raw = sec.get("paragraphs")
        if not isinstance(paras_raw, list):
            raise ValueError(f"section {si} missing paragraphs")
        if not paras_raw and not sec["title"].strip():
            raise ValueError(f"section {si} has no paragraphs and no title")
        paragraphs = []
        for pi, para in enumerate(paras_raw):
            if not isinstance(para, list):
                raise ValueError(f"section {si} paragraph {pi} is not a sentence list")
            for sentence in para:
                if not isinstance(sentence, str) or not sentence.strip():
                    raise ValueError(f"section {si} paragraph {pi} has an empty sentence")
            paragraphs.append(tuple(para))
        sections.append(Section(title=sec["title"], paragraphs=tuple(paragraphs)))

    return Document(
        id=doc_id,
        title=title,
        authors=tuple(authors),
        venue=venue,
        year=year,
        abstract=abstract,
        sections=tuple(sections),
    )


def ingest(path: str | Path) -> Corpus:
    """Load a JSONL corpus file.

    Records that fail validation are skipped and reported with their line
    number; a duplicated id is a hard error because it would corrupt unit
    addressing for both documents.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read corpus file {path}: {exc}") from exc

    documents: dict[str, Document] = {}
    skipped: list[tuple[int, str]] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            skipped.append((lineno, f"invalid JSON: {exc.msg}"))
            continue
        try:
            doc = _validate_record(record)
        except ValueError as exc:
            skipped.append((lineno, str(exc)))
            continue
        if doc.id in documents:
            raise DuplicateId(f"duplicate document id {doc.id!r} at line {lineno}", doc_id=doc.id)
        documents[doc.id] = doc

    if not documents:
        raise EmptyCorpus(f"no valid records in {path}", skipped=len(skipped))
    return Corpus(documents=documents, source_path=str(path), skipped=skipped)


def _check_index(value: int, size: int, what: str, doc_id: str) -> None:
    if not 0 <= value < size:
        raise IndexOutOfRange(
            f"{what} {value} out of range [0, {size}) in document {doc_id!r}",
            doc_id=doc_id,
        )


def resolve(corpus: Corpus, addr: UnitAddress) -> str:
    """Return the text a unit address points at.

    Paragraphs join their sentences with single spaces, sections join their
    paragraphs, and the document level joins title, abstract, and section
    texts (empty parts dropped).
    """
    doc = corpus.get(addr.doc_id)
    if addr.granularity is Granularity.DOCUMENT:
        parts = [doc.title, doc.abstract]
        parts += [" ".join(" ".join(p) for p in sec.paragraphs) for sec in doc.sections]
        return " ".join(part for part in parts if part)

    _check_index(addr.section_idx, len(doc.sections), "section index", doc.id)
    section = doc.sections[addr.section_idx]
    if addr.granularity is Granularity.SECTION:
        return " ".join(" ".join(p) for p in section.paragraphs)

    _check_index(addr.paragraph_idx, len(section.paragraphs), "paragraph index", doc.id)
    paragraph = section.paragraphs[addr.paragraph_idx]
    if addr.granularity is Granularity.PARAGRAPH:
        return " ".join(paragraph)

    _check_index(addr.sentence_idx, len(paragraph), "sentence index", doc.id)
    return paragraph[addr.sentence_idx]


def enumerate_units(
    corpus: Corpus, doc_id: str, granularity: Granularity
) -> list[tuple[UnitAddress, str]]:
    """All units of one granularity, in document order."""
    doc = corpus.get(doc_id)
    units: list[tuple[UnitAddress, str]] = []

    if granularity is Granularity.DOCUMENT:
        addr = UnitAddress(doc_id=doc_id, granularity=granularity)
        return [(addr, resolve(corpus, addr))]

    for si, section in enumerate(doc.sections):
        if granularity is Granularity.SECTION:
            addr = UnitAddress(doc_id, granularity, section_idx=si)
            units.append((addr, resolve(corpus, addr)))
            continue
        for pi, paragraph in enumerate(section.paragraphs):
            if granularity is Granularity.PARAGRAPH:
                addr = UnitAddress(doc_id, granularity, section_idx=si, paragraph_idx=pi)
                units.append((addr, resolve(corpus, addr)))
                continue
            for ti in range(len(paragraph)):
                addr = UnitAddress(
                    doc_id, granularity, section_idx=si, paragraph_idx=pi, sentence_idx=ti
                )
                units.append((addr, paragraph[ti]))
    return units


# CLI import path only. Splits after ". ", "? " or "! " when the next
# character is uppercase; good enough for preparing demo corpora, not a
# substitute for real segmentation.
_SPLIT_RE = re.compile(r"(?<=[.?!])\s+(?=[A-Z])")


def split_sentences(text: str) -> list[str]:
    return [part.strip() for part in _SPLIT_RE.split(text) if part.strip()]
