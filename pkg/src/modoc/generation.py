"""Gateway to abstractive text functions over pluggable providers.

Only the deterministic stub provider ships in-repo; remote models hang off
the same wire contract behind register_provider. Every result lands in an
append-only audit log keyed by request digest, which is what the manuscript
store checks before any generated text may enter a document.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Callable

from .corpus import Document
from .errors import (
    DuplicateProviderId,
    InvalidRequest,
    ProviderTimeout,
    ProviderUnreachable,
    UnsupportedKind,
)
from .query import RULE_BASED_PARSER, format_query

STUB_PROVIDER_ID = "stub"
DEFAULT_TIMEOUT_SECONDS = 30.0
CONCLUSION_TOKEN_BUDGET = 30
CITATION_MARKER = "#REFR"


class GenerationKind(str, Enum):
    CITATION = "citation"
    CONCLUSION = "conclusion"
    ASSISTANT = "assistant"
    QUERY_PARSE = "query_parse"


class CitationIntent(str, Enum):
    BACKGROUND = "Background"
    METHOD = "Method"
    COMPARISON = "Comparison"


@dataclass(frozen=True)
class ChatTurn:
    role: str
    text: str


@dataclass(frozen=True)
class GenerationRequest:
    kind: GenerationKind
    context: str = ""
    keywords: tuple[str, ...] = ()
    target_doc: str | None = None
    intent: CitationIntent | None = None
    history: tuple[ChatTurn, ...] = ()
    provider_id: str = STUB_PROVIDER_ID

    def validate(self) -> "GenerationRequest":
        if self.kind is GenerationKind.CITATION and not self.target_doc:
            raise InvalidRequest("citation generation needs a target document", field="target_doc")
        if self.kind is GenerationKind.CONCLUSION and not self.context.strip():
            raise InvalidRequest("conclusion generation needs a premise", field="context")
        if self.kind in (GenerationKind.ASSISTANT, GenerationKind.QUERY_PARSE) and not self.context.strip():
            raise InvalidRequest(f"{self.kind.value} needs a prompt", field="context")
        return self

    def digest(self) -> str:
        payload = {
            "kind": self.kind.value,
            "context": self.context,
            "keywords": list(self.keywords),
            "target_doc": self.target_doc,
            "intent": self.intent.value if self.intent else None,
            "history": [[t.role, t.text] for t in self.history],
            "provider_id": self.provider_id,
        }
        canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GenerationResult:
    text: str
    kind: GenerationKind
    provider_id: str
    request_digest: str
    created_at: str
    markers: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "kind": self.kind.value,
            "provider_id": self.provider_id,
            "request_digest": self.request_digest,
            "created_at": self.created_at,
            "markers": list(self.markers),
        }


@dataclass(frozen=True)
class Provider:
    provider_id: str
    capabilities: frozenset[GenerationKind]
    base_url: str = ""
    credential_env: str = ""
    timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS

    def to_dict(self) -> dict:
        return {
            "provider_id": self.provider_id,
            "capabilities": sorted(k.value for k in self.capabilities),
            "base_url": self.base_url,
            "credential_env": self.credential_env,
            "timeout_seconds": self.timeout_seconds,
        }


STUB_PROVIDER = Provider(
    provider_id=STUB_PROVIDER_ID,
    capabilities=frozenset(GenerationKind),
)

_SENTENCE_END_RE = re.compile(r"(?<=[.?!])\s+(?=[A-Z])")


def _first_sentence(text: str) -> str:
    parts = _SENTENCE_END_RE.split(text.strip(), maxsplit=1)
    return parts[0] if parts else ""


def _marker_positions(text: str) -> tuple[int, ...]:
    positions = []
    start = text.find(CITATION_MARKER)
    while start != -1:
        positions.append(start)
        start = text.find(CITATION_MARKER, start + 1)
    return tuple(positions)


def _stub_text(req: GenerationRequest, doc_lookup: Callable[[str], Document] | None) -> str:
    if req.kind is GenerationKind.CITATION:
        abstract = ""
        if doc_lookup is not None:
            abstract = doc_lookup(req.target_doc).abstract
        sentence = _first_sentence(abstract)
        prefix = f"[{req.intent.value}] " if req.intent else ""
        return f"{prefix}{CITATION_MARKER} {sentence}"
    if req.kind is GenerationKind.CONCLUSION:
        return "Therefore, " + " ".join(req.context.split()[:CONCLUSION_TOKEN_BUDGET])
    if req.kind is GenerationKind.ASSISTANT:
        return "STUB: " + req.context
    return format_query(RULE_BASED_PARSER.parse_natural(req.context))


class AuditLog:
    """Append-only record of every generation, keyed by request digest."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._entries: list[GenerationResult] = []
        self._by_digest: dict[str, list[GenerationResult]] = {}

    def append(self, result: GenerationResult) -> None:
        with self._lock:
            self._entries.append(result)
            self._by_digest.setdefault(result.request_digest, []).append(result)

    def __contains__(self, digest: str) -> bool:
        return digest in self._by_digest

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, digest: str) -> list[GenerationResult]:
        return list(self._by_digest.get(digest, []))

    def entries(self) -> list[GenerationResult]:
        return list(self._entries)


class GenerationGateway:
    """Provider registry plus the generate entry point.

    The stub provider is always registered and cannot be removed; remote
    providers are mapped onto a single POST exchange carrying the documented
    request fields and returning ``{"text": ...}``.
    """

    def __init__(
        self,
        doc_lookup: Callable[[str], Document] | None = None,
        per_provider_concurrency: int = 4,
    ) -> None:
        self._doc_lookup = doc_lookup
        self._providers: dict[str, Provider] = {STUB_PROVIDER_ID: STUB_PROVIDER}
        self._registry_lock = threading.Lock()
        self._limits: dict[str, threading.Semaphore] = {
            STUB_PROVIDER_ID: threading.Semaphore(per_provider_concurrency)
        }
        self._concurrency = per_provider_concurrency
        self.audit = AuditLog()

    def list_providers(self) -> list[Provider]:
        with self._registry_lock:
            return [self._providers[pid] for pid in sorted(self._providers)]

    def get_provider(self, provider_id: str) -> Provider:
        provider = self._providers.get(provider_id)
        if provider is None:
            raise ProviderUnreachable(
                f"no provider registered under {provider_id!r}", provider_id=provider_id
            )
        return provider

    def register_provider(self, provider: Provider) -> Provider:
        with self._registry_lock:
            if provider.provider_id in self._providers:
                raise DuplicateProviderId(
                    f"provider id {provider.provider_id!r} already registered",
                    provider_id=provider.provider_id,
                )
            self._providers[provider.provider_id] = provider
            self._limits[provider.provider_id] = threading.Semaphore(self._concurrency)
        return provider

    def generate(self, req: GenerationRequest, provider: Provider | None = None) -> GenerationResult:
        req = req.validate()
        provider = provider or self.get_provider(req.provider_id)
        if req.kind not in provider.capabilities:
            raise UnsupportedKind(
                f"provider {provider.provider_id!r} does not support {req.kind.value}",
                provider_id=provider.provider_id,
                kind=req.kind.value,
            )
        with self._limits[provider.provider_id]:
            if provider.provider_id == STUB_PROVIDER_ID:
                text = _stub_text(req, self._doc_lookup)
            else:
                text = self._call_remote(req, provider)
        result = GenerationResult(
            text=text,
            kind=req.kind,
            provider_id=provider.provider_id,
            request_digest=req.digest(),
            created_at=datetime.now(timezone.utc).isoformat(),
            markers=_marker_positions(text) if req.kind is GenerationKind.CITATION else (),
        )
        self.audit.append(result)
        return result

    def _call_remote(self, req: GenerationRequest, provider: Provider) -> str:
        target_metadata = None
        if req.target_doc and self._doc_lookup is not None:
            doc = self._doc_lookup(req.target_doc)
            target_metadata = {
                "title": doc.title,
                "authors": [{"full_name": a} for a in doc.authors],
                "venue": doc.venue,
                "year": doc.year,
            }
        payload = {
            "kind": req.kind.value,
            "context": req.context,
            "keywords": list(req.keywords),
            "intent": req.intent.value if req.intent else None,
            "target_doc_metadata": target_metadata,
            "history": [{"role": t.role, "text": t.text} for t in req.history],
        }
        request = urllib.request.Request(
            provider.base_url,
            data=json.dumps(payload).encode("utf-8"),
            headers=self._auth_headers(provider),
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=provider.timeout_seconds) as response:
                body = json.loads(response.read().decode("utf-8"))
        except TimeoutError as exc:
            raise ProviderTimeout(
                f"provider {provider.provider_id!r} timed out after {provider.timeout_seconds}s"
            ) from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, TimeoutError):
                raise ProviderTimeout(
                    f"provider {provider.provider_id!r} timed out after {provider.timeout_seconds}s"
                ) from exc
            raise ProviderUnreachable(
                f"provider {provider.provider_id!r} unreachable: {exc}"
            ) from exc
        if not isinstance(body, dict) or not isinstance(body.get("text"), str):
            raise ProviderUnreachable(
                f"provider {provider.provider_id!r} returned a malformed response"
            )
        return body["text"]

    @staticmethod
    def _auth_headers(provider: Provider) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if provider.credential_env:
            credential = os.environ.get(provider.credential_env, "")
            if credential:
                headers["Authorization"] = f"Bearer {credential}"
        return headers
