"""The four extractive functions: discovery, alignment, keyphrases, highlights.

All four are pure functions of (index, corpus, inputs) with total ordering
rules (score descending, then doc id or document order ascending), so their
output can be replayed and compared byte-for-byte against brute-force
oracles at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus, Granularity, UnitAddress, enumerate_units
from .embedding import centroid, cosine, embed, tokenize
from .errors import EmptyQueryText, NoCandidates, NoUnits
from .index import Index
from .query import Field, Query, QueryTerm
from .stopwords import STOPWORDS

KEYPHRASE_POOL = 100
KEYPHRASE_COUNT = 5
MMR_LAMBDA = 0.7


@dataclass(frozen=True)
class SearchResult:
    doc_id: str
    score: float
    rank: int
    matched_terms: tuple[QueryTerm, ...]
    title: str
    authors: tuple[str, ...]
    venue: str
    year: int | None

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "score": self.score,
            "rank": self.rank,
            "matched_terms": [t.to_dict() for t in self.matched_terms],
            "metadata": {
                "title": self.title,
                "authors": [{"full_name": a} for a in self.authors],
                "venue": self.venue,
                "year": self.year,
            },
        }


@dataclass(frozen=True)
class AlignmentHit:
    address: UnitAddress
    text: str
    score: float
    rank: int

    def to_dict(self) -> dict:
        return {
            "address": self.address.to_dict(),
            "text": self.text,
            "score": self.score,
            "rank": self.rank,
        }


@dataclass(frozen=True)
class Keyphrase:
    phrase: str
    score: float

    def to_dict(self) -> dict:
        return {"phrase": self.phrase, "score": self.score}


class _TokenDocs:
    """Per-query memo of token -> doc-id sets; building these once matters
    because common tokens carry postings lists the size of the corpus."""

    def __init__(self, index: Index) -> None:
        self._index = index
        self._memo: dict[tuple[Field, str], set[str]] = {}

    def get(self, fld: Field, token: str) -> set[str]:
        key = (fld, token)
        docs = self._memo.get(key)
        if docs is not None:
            return docs
        if fld is Field.ANY:
            docs = set()
            for bucket in self._index.postings.values():
                docs.update(bucket.get(token, ()))
        else:
            bucket_name = {
                Field.TITLE: "title",
                Field.ABSTRACT: "abstract",
                Field.VENUE: "venue",
                Field.AUTHOR_FULL_NAME: "author",
            }[fld]
            docs = set(self._index.postings[bucket_name].get(token, ()))
        self._memo[key] = docs
        return docs


def _term_matches(
    index: Index, token_docs: _TokenDocs, term: QueryTerm, universe: set[str]
) -> set[str]:
    """Documents matching one non-Year term: every token of the term appears
    in the term's field; Author.FullName additionally needs all tokens inside
    a single author's name."""
    tokens = tokenize(term.text)
    if not tokens:
        return set(universe)
    per_token = sorted((token_docs.get(term.field, t) for t in tokens), key=len)
    docs = set(per_token[0])
    for other in per_token[1:]:
        docs &= other
        if not docs:
            break
    if term.field is Field.AUTHOR_FULL_NAME:
        needed = set(tokens)
        docs = {
            d
            for d in docs
            if any(needed <= set(tokenize(name)) for name in index.metadata[d].authors)
        }
    return docs


def _year_constraints(q: Query) -> list[tuple[int, int]]:
    windows = []
    if q.year_range is not None:
        windows.append(q.year_range)
    for term in q.terms:
        if term.field is Field.YEAR and not term.negated:
            if ".." in term.text:
                left, _, right = term.text.partition("..")
                windows.append((int(left), int(right)))
            else:
                year = int(term.text)
                windows.append((year, year))
    return windows


def _lexical_score(
    token_docs: _TokenDocs, doc_id: str, positive_terms: list[QueryTerm]
) -> float:
    """Fraction of distinct query tokens the document matches, each token
    checked in the field of a term that carries it."""
    all_tokens: set[str] = set()
    matched: set[str] = set()
    for term in positive_terms:
        if term.field is Field.YEAR:
            continue
        for token in tokenize(term.text):
            all_tokens.add(token)
            if token not in matched and doc_id in token_docs.get(term.field, token):
                matched.add(token)
    if not all_tokens:
        return 0.0
    return len(matched) / len(all_tokens)


def discover(index: Index, q: Query) -> list[SearchResult]:
    """Two-stage literature discovery.

    Stage 1 (lexical) intersects all non-negated terms, applies year
    filters (documents without a year drop out whenever a year filter
    exists), then removes documents matching any negated term. Stage 2
    ranks by cosine against the context text when present, otherwise by
    matched-token fraction; ties break by ascending doc id.
    """
    q = q.validate()
    universe = set(index.year_of)
    token_docs = _TokenDocs(index)
    positive = [t for t in q.terms if not t.negated]
    negative = [t for t in q.terms if t.negated]

    candidates = set(universe)
    for term in positive:
        if term.field is Field.YEAR:
            continue
        candidates &= _term_matches(index, token_docs, term, universe)
        if not candidates:
            break

    windows = _year_constraints(q)
    if windows:
        candidates = {
            d
            for d in candidates
            if index.year_of[d] is not None
            and all(start <= index.year_of[d] <= end for start, end in windows)
        }

    for term in negative:
        if not candidates:
            break
        candidates -= _term_matches(index, token_docs, term, universe)

    if q.context_text:
        context_embedding = embed(q.context_text)
        scored = [
            (cosine(context_embedding, index.doc_embedding[d]), d) for d in candidates
        ]
    else:
        scored = [(_lexical_score(token_docs, d, positive), d) for d in candidates]

    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    matched_terms = tuple(positive)
    results = []
    for rank, (score, doc_id) in enumerate(scored[: q.limit], start=1):
        meta = index.metadata[doc_id]
        results.append(
            SearchResult(
                doc_id=doc_id,
                score=score,
                rank=rank,
                matched_terms=matched_terms,
                title=meta.title,
                authors=meta.authors,
                venue=meta.venue,
                year=meta.year,
            )
        )
    return results


ALIGN_GRANULARITIES = (Granularity.SENTENCE, Granularity.PARAGRAPH, Granularity.SECTION)


def align(
    corpus: Corpus, query_text: str, doc_id: str, granularity: Granularity
) -> list[AlignmentHit]:
    """Rank every unit of the document at the requested granularity by cosine
    similarity to the query text; ties keep document order."""
    if not query_text or not query_text.strip():
        raise EmptyQueryText("alignment query text is empty")
    if granularity not in ALIGN_GRANULARITIES:
        raise NoUnits(f"alignment does not support granularity {granularity.value!r}")
    units = enumerate_units(corpus, doc_id, granularity)
    if not units:
        raise NoUnits(
            f"document {doc_id!r} has no units at granularity {granularity.value!r}",
            doc_id=doc_id,
        )
    query_embedding = embed(query_text)
    scored = [
        (cosine(query_embedding, embed(text)), order, addr, text)
        for order, (addr, text) in enumerate(units)
    ]
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [
        AlignmentHit(address=addr, text=text, score=score, rank=rank)
        for rank, (score, _, addr, text) in enumerate(scored, start=1)
    ]


def _candidate_phrases(tokens: list[str], banned: set[str]) -> set[str]:
    phrases: set[str] = set()
    for n in (1, 2, 3):
        for start in range(len(tokens) - n + 1):
            window = tokens[start : start + n]
            if window[0] in STOPWORDS or window[-1] in STOPWORDS:
                continue
            if any(tok in banned for tok in window):
                continue
            phrases.add(" ".join(window))
    return phrases


def suggest_keyphrases(
    index: Index, corpus: Corpus, results: list[SearchResult], q: Query
) -> list[Keyphrase]:
    """Distill up to five representative phrases from the top results.

    Candidates are 1-3 grams from the result documents' titles and abstracts
    with no stopword at either end and no token already used by the query;
    each is scored by cosine against the centroid of the result documents'
    embeddings.
    """
    if not results:
        raise NoCandidates("no result documents to extract keyphrases from")
    pool = results[:KEYPHRASE_POOL]
    banned: set[str] = set()
    for term in q.terms:
        banned.update(tokenize(term.text))

    phrases: set[str] = set()
    for result in pool:
        doc = corpus.get(result.doc_id)
        phrases |= _candidate_phrases(tokenize(doc.title), banned)
        phrases |= _candidate_phrases(tokenize(doc.abstract), banned)
    if not phrases:
        raise NoCandidates("every candidate phrase was filtered out")

    center = centroid([index.doc_embedding[r.doc_id] for r in pool])
    scored = [(cosine(embed(phrase), center), phrase) for phrase in phrases]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [Keyphrase(phrase=p, score=s) for s, p in scored[:KEYPHRASE_COUNT]]


def highlights(corpus: Corpus, doc_id: str, k: int = 5) -> list[AlignmentHit]:
    """Extractive highlights: score body sentences against their centroid and
    greedily pick k by maximal marginal relevance (lambda 0.7, ties falling
    back to document order); selected sentences come back in document order
    with the score that selected them."""
    units = enumerate_units(corpus, doc_id, Granularity.SENTENCE)
    if not units:
        raise NoUnits(f"document {doc_id!r} has no body sentences", doc_id=doc_id)

    embeddings = [embed(text) for _, text in units]
    center = centroid(embeddings)
    relevance = [cosine(e, center) for e in embeddings]

    selected: list[int] = []
    selection_score: dict[int, float] = {}
    while len(selected) < min(k, len(units)):
        best_idx = -1
        best_value = float("-inf")
        for i in range(len(units)):
            if i in selection_score:
                continue
            if not selected:
                value = relevance[i]
            else:
                redundancy = max(cosine(embeddings[i], embeddings[j]) for j in selected)
                value = MMR_LAMBDA * relevance[i] - (1.0 - MMR_LAMBDA) * redundancy
            if value > best_value:
                best_value = value
                best_idx = i
        selected.append(best_idx)
        selection_score[best_idx] = best_value

    return [
        AlignmentHit(
            address=units[i][0], text=units[i][1], score=selection_score[i], rank=rank
        )
        for rank, i in enumerate(sorted(selected), start=1)
    ]
