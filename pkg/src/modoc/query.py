"""Boolean fielded query language.

Structured syntax (whitespace-separated items, double quotes group phrases):

    songbird NOT:"zebra finch" Title:vocal learning Author.FullName:"J. Doe"
    Year:2020..2024 Year:1999

``NOT:`` negates a single item. A field prefix other than ``Year`` absorbs
following bare words into its phrase until the next prefixed or quoted item,
so ``Title:vocal learning`` filters on the whole phrase. ``Year:A..B`` sets
the query's year range; a single ``Year:N`` becomes an ordinary term.
AND semantics across all non-negated items live in the Query value itself;
parsing never touches the corpus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Protocol

from .corpus import YEAR_MAX
from .errors import EmptyQuery, MalformedYearRange, NegatedYear, UnknownField
from .stopwords import STOPWORDS

DEFAULT_LIMIT = 20


class Field(str, Enum):
    ANY = "Any"
    TITLE = "Title"
    ABSTRACT = "Abstract"
    VENUE = "Venue"
    AUTHOR_FULL_NAME = "Author.FullName"
    YEAR = "Year"


_FIELD_BY_LOWER = {f.value.lower(): f for f in Field if f is not Field.ANY}


@dataclass(frozen=True)
class QueryTerm:
    field: Field
    text: str
    negated: bool = False

    def to_dict(self) -> dict:
        return {"field": self.field.value, "text": self.text, "negated": self.negated}

    @classmethod
    def from_dict(cls, data: dict) -> "QueryTerm":
        return cls(Field(data["field"]), data["text"], bool(data.get("negated", False)))


@dataclass(frozen=True)
class Query:
    terms: tuple[QueryTerm, ...] = ()
    year_range: tuple[int, int] | None = None
    context_text: str | None = None
    limit: int = DEFAULT_LIMIT

    def validate(self) -> "Query":
        if not self.terms and not self.context_text:
            raise EmptyQuery("query needs at least one term or a context text")
        if self.limit < 1:
            raise EmptyQuery(f"limit must be positive, got {self.limit}")
        for term in self.terms:
            if not term.text:
                raise EmptyQuery("term with empty text")
            if term.field is Field.YEAR:
                if term.negated:
                    raise NegatedYear("NOT cannot apply to a Year term")
                _parse_year_text(term.text)
        if self.year_range is not None:
            start, end = self.year_range
            if start > end:
                raise MalformedYearRange(f"year range {start}..{end} has start > end")
        return self

    def with_context(self, context_text: str | None) -> "Query":
        return replace(self, context_text=context_text)

    def to_dict(self) -> dict:
        return {
            "terms": [t.to_dict() for t in self.terms],
            "year_range": list(self.year_range) if self.year_range else None,
            "context_text": self.context_text,
            "limit": self.limit,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Query":
        year_range = data.get("year_range")
        return cls(
            terms=tuple(QueryTerm.from_dict(t) for t in data.get("terms", [])),
            year_range=tuple(year_range) if year_range else None,
            context_text=data.get("context_text"),
            limit=int(data.get("limit", DEFAULT_LIMIT)),
        )


def _parse_year_text(text: str) -> tuple[int, int]:
    """Parse 'N' or 'A..B' into an inclusive (start, end) pair."""
    if ".." in text:
        left, _, right = text.partition("..")
        try:
            start, end = int(left), int(right)
        except ValueError:
            raise MalformedYearRange(f"year range {text!r} is not integer..integer") from None
        if start > end:
            raise MalformedYearRange(f"year range {text!r} has start > end")
        return start, end
    try:
        year = int(text)
    except ValueError:
        raise MalformedYearRange(f"year {text!r} is not an integer") from None
    return year, year


def _lex_items(text: str) -> list[str]:
    """Whitespace-split, with double-quoted regions kept inside one item.

    An unterminated quote runs to the end of the input, keeping the lexer
    total over arbitrary strings.
    """
    items: list[str] = []
    current: list[str] = []
    in_quote = False
    for ch in text:
        if ch == '"':
            in_quote = not in_quote
            current.append(ch)
        elif ch.isspace() and not in_quote:
            if current:
                items.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        items.append("".join(current))
    return items


_PREFIX_RE = re.compile(r"^([A-Za-z][A-Za-z.]*):(.*)$", re.DOTALL)


def _split_prefixes(item: str) -> tuple[bool, Field | None, str]:
    """Return (negated, field or None for bare items, remainder)."""
    negated = False
    if item[:4].upper() == "NOT:":
        negated = True
        item = item[4:]
    match = _PREFIX_RE.match(item)
    if match and not item.startswith('"'):
        name = match.group(1)
        fld = _FIELD_BY_LOWER.get(name.lower())
        if fld is None:
            raise UnknownField(f"unknown field prefix {name!r}", prefix=name)
        return negated, fld, match.group(2)
    return negated, None, item


def _is_bare(item: str) -> bool:
    """True when the item carries no prefix and no quotes (absorbable)."""
    if '"' in item:
        return False
    if item[:4].upper() == "NOT:":
        return False
    return _PREFIX_RE.match(item) is None


def parse_structured(text: str) -> Query:
    """Parse the structured syntax into a Query.

    Raises EmptyQuery, MalformedYearRange, UnknownField, or NegatedYear;
    no other failure mode exists for any input string.
    """
    if not text or not text.strip():
        raise EmptyQuery("query string is empty")

    items = _lex_items(text)
    terms: list[QueryTerm] = []
    year_range: tuple[int, int] | None = None

    i = 0
    while i < len(items):
        negated, fld, rest = _split_prefixes(items[i])
        i += 1

        if fld is Field.YEAR:
            if negated:
                raise NegatedYear("NOT cannot apply to a Year item")
            phrase = rest.replace('"', "")
            if not phrase:
                raise EmptyQuery("Year prefix with no value")
            if ".." in phrase:
                # Last range wins; the Query carries a single year window.
                year_range = _parse_year_text(phrase)
            else:
                _parse_year_text(phrase)
                terms.append(QueryTerm(Field.YEAR, phrase, negated=False))
            continue

        quoted = rest.startswith('"')
        phrase = rest.replace('"', "")
        if fld is not None and not quoted:
            # Unquoted fielded phrase runs to the next non-bare item.
            absorbed = [phrase] if phrase else []
            while i < len(items) and _is_bare(items[i]):
                absorbed.append(items[i])
                i += 1
            phrase = " ".join(absorbed)
        if not phrase:
            raise EmptyQuery("item with an empty phrase")
        terms.append(QueryTerm(fld or Field.ANY, phrase, negated=negated))

    return Query(terms=tuple(terms), year_range=year_range).validate()


def format_query(q: Query) -> str:
    """Canonical text form; parse_structured(format_query(q)) == q for any
    query expressible in the grammar (term texts must not contain double
    quotes, which the grammar cannot produce)."""
    parts: list[str] = []
    for term in q.terms:
        prefix = "NOT:" if term.negated else ""
        if term.field is Field.YEAR:
            parts.append(f"{prefix}Year:{term.text}")
            continue
        if term.field is not Field.ANY:
            prefix += f"{term.field.value}:"
        parts.append(f'{prefix}"{term.text}"')
    if q.year_range is not None:
        parts.append(f"Year:{q.year_range[0]}..{q.year_range[1]}")
    return " ".join(parts)


class QueryParserProvider(Protocol):
    """Contract for natural-language query parsers; implementations must
    return a Query that survives format_query round-tripping."""

    def parse_natural(self, text: str) -> Query: ...


_YEAR_PATTERNS = (
    (re.compile(r"\bfrom\s+(\d{4})\s+to\s+(\d{4})\b", re.IGNORECASE), "pair"),
    (re.compile(r"\bbetween\s+(\d{4})\s+and\s+(\d{4})\b", re.IGNORECASE), "pair"),
    (re.compile(r"\bsince\s+(\d{4})\b", re.IGNORECASE), "open"),
    (re.compile(r"\bin\s+(\d{4})\b", re.IGNORECASE), "single"),
)

_AUTHOR_RE = re.compile(
    r"(?:\b(?:papers?|articles?|publications?|works?)\s+)?"
    r"\b(?:by|from)\s+((?:[A-Z][\w'.-]*)(?:\s+[A-Z][\w'.-]*)*)"
)

_QUOTED_RE = re.compile(r'"([^"]+)"')

_WORD_RE = re.compile(r"[A-Za-z0-9]+")


class RuleBasedQueryParser:
    """Deterministic pattern rules: author phrases become Author.FullName
    terms, year phrases become the year range, quoted phrases become Title
    terms, and leftover non-stopword words become Any terms."""

    def parse_natural(self, text: str) -> Query:
        working = text
        year_range: tuple[int, int] | None = None
        for pattern, kind in _YEAR_PATTERNS:
            match = pattern.search(working)
            while match:
                if year_range is None:
                    a = int(match.group(1))
                    b = a if kind != "pair" else int(match.group(2))
                    if kind == "open":
                        b = YEAR_MAX
                    year_range = (min(a, b), max(a, b))
                working = working[: match.start()] + " " + working[match.end():]
                match = pattern.search(working)

        authors: list[str] = []
        match = _AUTHOR_RE.search(working)
        while match:
            authors.append(re.sub(r"\s+", " ", match.group(1).strip()))
            working = working[: match.start()] + " " + working[match.end():]
            match = _AUTHOR_RE.search(working)

        titles: list[str] = []
        match = _QUOTED_RE.search(working)
        while match:
            titles.append(re.sub(r"\s+", " ", match.group(1).strip()))
            working = working[: match.start()] + " " + working[match.end():]
            match = _QUOTED_RE.search(working)

        words = [
            w.lower()
            for w in _WORD_RE.findall(working)
            if w.lower() not in STOPWORDS
        ]

        terms = [QueryTerm(Field.AUTHOR_FULL_NAME, name) for name in authors]
        terms += [QueryTerm(Field.TITLE, title) for title in titles if title]
        terms += [QueryTerm(Field.ANY, w) for w in words]
        return Query(terms=tuple(terms), year_range=year_range).validate()


RULE_BASED_PARSER = RuleBasedQueryParser()


def parse_natural(text: str, parser: QueryParserProvider | None = None) -> Query:
    """Parse free text with the given provider (rule-based by default).

    Model-backed providers may raise ProviderFailure; callers choosing to
    fall back should re-invoke with the rule-based default.
    """
    if not text or not text.strip():
        raise EmptyQuery("natural query is empty")
    provider = parser if parser is not None else RULE_BASED_PARSER
    return provider.parse_natural(text)
