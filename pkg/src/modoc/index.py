"""Inverted + vector index over a corpus.

Postings are kept per searchable field so fielded terms intersect only the
relevant token lists; every document also gets one embedding of its
title + abstract for semantic ranking. Indexes are immutable once built and
serialize deterministically: rebuilding from the same corpus produces a
byte-identical file.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus, Document
from .embedding import Embedding, EmbedderSpec, embed, tokenize
from .errors import FileUnreadable, IndexCorpusMismatch

FORMAT_VERSION = 1

POSTING_FIELDS = ("title", "abstract", "body", "venue", "author")


def _canonical_record(doc: Document) -> dict:
    return {
        "id": doc.id,
        "title": doc.title,
        "authors": [{"full_name": name} for name in doc.authors],
        "venue": doc.venue,
        "year": doc.year,
        "abstract": doc.abstract,
        "sections": [
            {"title": sec.title, "paragraphs": [list(p) for p in sec.paragraphs]}
            for sec in doc.sections
        ],
    }


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def corpus_fingerprint(corpus: Corpus) -> str:
    """SHA-256 over the canonical serialization of all documents, sorted by id."""
    digest = hashlib.sha256()
    for doc in corpus:
        digest.update(_dumps(_canonical_record(doc)).encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


@dataclass(frozen=True)
class DocMetadata:
    title: str
    authors: tuple[str, ...]
    venue: str
    year: int | None

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "authors": list(self.authors),
            "venue": self.venue,
            "year": self.year,
        }


@dataclass
class Index:
    postings: dict[str, dict[str, list[str]]]
    year_of: dict[str, int | None]
    doc_embedding: dict[str, Embedding]
    metadata: dict[str, DocMetadata]
    embedder: EmbedderSpec
    corpus_fingerprint: str
    _matrix_cache: tuple[list[str], np.ndarray] | None = field(
        default=None, repr=False, compare=False
    )

    @property
    def doc_ids(self) -> list[str]:
        return sorted(self.year_of)

    def __len__(self) -> int:
        return len(self.year_of)

    def embedding_matrix(self) -> tuple[list[str], np.ndarray]:
        """(sorted doc ids, stacked embedding rows); built lazily, the index
        is immutable so the cache never invalidates."""
        if self._matrix_cache is None:
            ids = self.doc_ids
            matrix = np.vstack([self.doc_embedding[d].values for d in ids])
            object.__setattr__(self, "_matrix_cache", (ids, matrix))
        return self._matrix_cache


def _field_texts(doc: Document) -> dict[str, list[str]]:
    return {
        "title": [doc.title],
        "abstract": [doc.abstract],
        "body": doc.body_sentences(),
        "venue": [doc.venue],
        "author": list(doc.authors),
    }


def build_index(corpus: Corpus, embedder: EmbedderSpec | None = None) -> Index:
    """Build the complete index; deterministic given corpus and embedder spec."""
    spec = embedder or EmbedderSpec()
    if spec.dimension != embed("").dimension:
        raise ValueError(f"unsupported embedder dimension {spec.dimension}")

    postings: dict[str, dict[str, set[str]]] = {f: {} for f in POSTING_FIELDS}
    year_of: dict[str, int | None] = {}
    doc_embedding: dict[str, Embedding] = {}
    metadata: dict[str, DocMetadata] = {}

    for doc in corpus:
        year_of[doc.id] = doc.year
        doc_embedding[doc.id] = embed(doc.title + " " + doc.abstract)
        metadata[doc.id] = DocMetadata(
            title=doc.title, authors=doc.authors, venue=doc.venue, year=doc.year
        )
        for fname, texts in _field_texts(doc).items():
            bucket = postings[fname]
            for text in texts:
                for token in tokenize(text):
                    bucket.setdefault(token, set()).add(doc.id)

    sorted_postings = {
        fname: {token: sorted(ids) for token, ids in sorted(bucket.items())}
        for fname, bucket in postings.items()
    }
    return Index(
        postings=sorted_postings,
        year_of=year_of,
        doc_embedding=doc_embedding,
        metadata=metadata,
        embedder=spec,
        corpus_fingerprint=corpus_fingerprint(corpus),
    )


def save_index(index: Index, path: str | Path) -> None:
    """Write the line-delimited index file: a self-describing header, one
    postings line per field, the year map, and one embedding line per doc."""
    path = Path(path)
    lines = [
        _dumps(
            {
                "format_version": FORMAT_VERSION,
                "corpus_fingerprint": index.corpus_fingerprint,
                "embedder": index.embedder.to_dict(),
                "document_count": len(index),
            }
        ),
        _dumps({"year_of": index.year_of}),
        _dumps({"metadata": {d: m.to_dict() for d, m in sorted(index.metadata.items())}}),
    ]
    for fname in POSTING_FIELDS:
        lines.append(_dumps({"field": fname, "postings": index.postings[fname]}))
    for doc_id in index.doc_ids:
        lines.append(_dumps({"doc": doc_id, "embedding": index.doc_embedding[doc_id].tolist()}))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_index(path: str | Path, corpus: Corpus | None = None) -> Index:
    """Load an index file; when a corpus is supplied its fingerprint must
    match the header or the load is refused."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read index file {path}: {exc}") from exc

    lines = raw.splitlines()
    if not lines:
        raise FileUnreadable(f"index file {path} is empty")
    header = json.loads(lines[0])
    if header.get("format_version") != FORMAT_VERSION:
        raise FileUnreadable(
            f"unsupported index format_version {header.get('format_version')!r}"
        )
    if corpus is not None:
        actual = corpus_fingerprint(corpus)
        if actual != header["corpus_fingerprint"]:
            raise IndexCorpusMismatch(
                "index was built from a different corpus",
                index_fingerprint=header["corpus_fingerprint"],
                corpus_fingerprint=actual,
            )

    year_of = json.loads(lines[1])["year_of"]
    metadata_raw = json.loads(lines[2])["metadata"]
    metadata = {
        d: DocMetadata(
            title=m["title"], authors=tuple(m["authors"]), venue=m["venue"], year=m["year"]
        )
        for d, m in metadata_raw.items()
    }

    postings: dict[str, dict[str, list[str]]] = {}
    doc_embedding: dict[str, Embedding] = {}
    for line in lines[3:]:
        record = json.loads(line)
        if "field" in record:
            postings[record["field"]] = record["postings"]
        else:
            doc_embedding[record["doc"]] = Embedding.from_values(record["embedding"])

    return Index(
        postings=postings,
        year_of=year_of,
        doc_embedding=doc_embedding,
        metadata=metadata,
        embedder=EmbedderSpec.from_dict(header["embedder"]),
        corpus_fingerprint=header["corpus_fingerprint"],
    )
