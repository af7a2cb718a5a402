"""HTTP service exposing the workbench to UIs.

One process owns the corpus, index, provider registry, workflow graphs, and
manuscript store. All read endpoints are side-effect-free; workflow and
manuscript mutations are serialized per graph / per manuscript id. Every
domain error surfaces as ``{"error": {"code", "message", "details"}}`` with
the module error name as the stable code.
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import dataclass, field as dataclass_field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, TypeVar

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field as PydanticField

from . import __version__
from .corpus import Corpus, Granularity, UnitAddress, ingest
from .errors import (
    EmptyQuery,
    InvalidRequest,
    ModocError,
    UnknownDocument,
    UnknownRequestDigest,
    UnknownWorkflow,
)
from .generation import (
    ChatTurn,
    CitationIntent,
    GenerationGateway,
    GenerationKind,
    GenerationRequest,
    Provider,
)
from .index import Index, build_index, load_index, save_index
from .manuscript import (
    CheckMethod,
    CheckRecord,
    ExportFormat,
    ManuscriptStore,
    Provenance,
    ReferenceEntry,
    cite,
    edit_span,
    ethics_report,
    export_reference,
    insert_generated,
    insert_span,
    verify_span,
)
from .query import Query, format_query, parse_natural, parse_structured
from .retrieval import SearchResult, align, discover, highlights, suggest_keyphrases
from .workflow import (
    FunctionKind,
    ModuleKind,
    PresetName,
    Services,
    WorkflowGraph,
    WriteScope,
    preset,
)

DEFAULT_PORT = 7870

_EnumT = TypeVar("_EnumT", bound=Enum)


def _enum(cls: type[_EnumT], value: Any, field: str) -> _EnumT:
    """Enum conversion that stays inside the documented error taxonomy."""
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(member.value for member in cls)
        raise InvalidRequest(
            f"{field} must be one of: {allowed}", field=field
        ) from None


_ERROR_STATUS = {
    "UnknownDocument": 404,
    "UnknownManuscript": 404,
    "UnknownModule": 404,
    "UnknownWorkflow": 404,
    "UnknownRequestDigest": 422,
    "DuplicateProviderId": 409,
    "FunctionAlreadyBound": 409,
    "SlotOccupied": 409,
    "WouldCreateCycle": 409,
    "IndexCorpusMismatch": 409,
    "ProviderUnreachable": 502,
    "ProviderTimeout": 504,
    "StorageFailure": 500,
    "ServiceError": 500,
    "PortInUse": 500,
}


@dataclass
class ServiceConfig:
    corpus_path: str
    index_path: str | None = None
    data_dir: str = dataclass_field(
        default_factory=lambda: os.environ.get("MODOC_DATA_DIR", "./modoc-data")
    )
    port: int = dataclass_field(
        default_factory=lambda: int(os.environ.get("MODOC_PORT", DEFAULT_PORT))
    )
    host: str = "127.0.0.1"


class AppState:
    """Everything the endpoints touch, with per-resource write locks."""

    def __init__(self, corpus: Corpus, index: Index, data_dir: str) -> None:
        self.corpus = corpus
        self.index = index
        self.gateway = GenerationGateway(doc_lookup=corpus.get)
        self.manuscripts = ManuscriptStore(data_dir)
        self.workflows: dict[str, WorkflowGraph] = {}
        self._workflow_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self.services = Services(
            corpus=corpus,
            index=index,
            gateway=self.gateway,
            manuscripts=self.manuscripts,
        )

    def new_workflow(self, preset_name: str | None) -> WorkflowGraph:
        graph_id = uuid.uuid4().hex
        graph = (
            preset(_enum(PresetName, preset_name, "preset"), graph_id=graph_id)
            if preset_name
            else WorkflowGraph(graph_id=graph_id)
        )
        with self._registry_lock:
            self.workflows[graph_id] = graph
            self._workflow_locks[graph_id] = threading.Lock()
        return graph

    def get_workflow(self, graph_id: str) -> WorkflowGraph:
        graph = self.workflows.get(graph_id)
        if graph is None:
            raise UnknownWorkflow(f"no workflow with id {graph_id!r}", workflow_id=graph_id)
        return graph

    def workflow_lock(self, graph_id: str) -> threading.Lock:
        self.get_workflow(graph_id)
        return self._workflow_locks[graph_id]

    def drop_workflow(self, graph_id: str) -> None:
        self.get_workflow(graph_id)
        with self._registry_lock:
            del self.workflows[graph_id]
            del self._workflow_locks[graph_id]


def _document_payload(corpus: Corpus, doc_id: str) -> dict:
    doc = corpus.get(doc_id)
    return {
        "id": doc.id,
        "title": doc.title,
        "authors": [{"full_name": a} for a in doc.authors],
        "venue": doc.venue,
        "year": doc.year,
        "abstract": doc.abstract,
        "sections": [
            {"title": sec.title, "paragraphs": [list(p) for p in sec.paragraphs]}
            for sec in doc.sections
        ],
    }


def _parse_query_payload(query: Any, context: str | None = None, limit: int | None = None) -> Query:
    if isinstance(query, str):
        q = parse_structured(query)
    elif isinstance(query, dict):
        try:
            q = Query.from_dict(query)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidRequest(f"malformed structured query: {exc}", field="query") from None
    elif query is None:
        q = Query()
    else:
        raise InvalidRequest("query must be a string or structured object", field="query")
    if context:
        q = q.with_context(context)
    if limit is not None:
        if limit < 1:
            raise EmptyQuery(f"limit must be positive, got {limit}")
        q = Query(terms=q.terms, year_range=q.year_range, context_text=q.context_text, limit=limit)
    return q.validate()


class SearchBody(BaseModel):
    query: str | dict | None = None
    context: str | None = None
    limit: int | None = None


class AlignBody(BaseModel):
    doc_id: str
    query_text: str
    granularity: str = "sentence"


class KeyphrasesBody(BaseModel):
    doc_ids: list[str]
    query: str | dict | None = None


class ParseQueryBody(BaseModel):
    text: str
    provider_id: str | None = None


class GenerateBody(BaseModel):
    kind: str
    context: str = ""
    keywords: list[str] = []
    target_doc: str | None = None
    intent: str | None = None
    history: list[dict] = []
    provider_id: str = "stub"


class ProviderBody(BaseModel):
    provider_id: str
    capabilities: list[str]
    base_url: str = ""
    credential_env: str = ""
    timeout_seconds: float = 30.0


class WorkflowBody(BaseModel):
    preset: str | None = None


class ModuleBody(BaseModel):
    kind: str


class ModuleUpdateBody(BaseModel):
    bind_function: str | None = None
    unbind: bool = False
    state: dict = {}


class LinkBody(BaseModel):
    from_module: str = PydanticField(alias="from")
    to_module: str = PydanticField(alias="to")
    slot: str

    model_config = {"populate_by_name": True}


class ManuscriptBody(BaseModel):
    title: str = "Untitled"
    manuscript_id: str | None = None


class ManuscriptUpdateBody(BaseModel):
    title: str | None = None
    workflow_graph_ref: str | None = None


class SpanBody(BaseModel):
    position: int
    provenance: str = "user_typed"
    text: str | None = None
    source: dict | None = None
    request_digest: str | None = None
    target_doc_id: str | None = None


class SpanEditBody(BaseModel):
    text: str


class VerifyBody(BaseModel):
    method: str = "alignment"
    evidence: list[list] = []
    user_confirmed: bool = False


class CiteBody(BaseModel):
    position: int
    doc_id: str


def _apply_module_state(node, state: dict, kind: ModuleKind) -> None:
    if kind is ModuleKind.WRITE:
        if "selection" in state:
            node.state.selection = state["selection"]
        if "scope" in state:
            node.state.scope = _enum(WriteScope, state["scope"], "scope")
        if "manuscript_id" in state:
            node.state.manuscript_id = state["manuscript_id"]
    elif kind is ModuleKind.KEYWORDS:
        if "query" in state:
            value = state["query"]
            if value is None:
                node.state.query = None
            elif isinstance(value, str):
                node.state.query = parse_structured(value)
            else:
                node.state.query = Query.from_dict(value).validate()
        if "free_text" in state:
            node.state.free_text = state["free_text"]
    elif kind is ModuleKind.READ:
        if "doc_id" in state:
            node.state.doc_id = state["doc_id"]
        if "granularity" in state:
            node.state.granularity = _enum(Granularity, state["granularity"], "granularity")
        if "display_scope" in state:
            node.state.display_scope = state["display_scope"]
        if "selection" in state:
            node.state.selection = state["selection"]
        if "highlight_count" in state:
            node.state.highlight_count = int(state["highlight_count"])
    elif kind is ModuleKind.GENERATION:
        if "provider_id" in state:
            node.state.provider_id = state["provider_id"]
        if "intent" in state:
            node.state.intent = _enum(CitationIntent, state["intent"], "intent") if state["intent"] else None
        if "target_doc_id" in state:
            node.state.target_doc_id = state["target_doc_id"]
        if "prompt" in state:
            node.state.prompt = state["prompt"]
    elif state:
        raise InvalidRequest(f"{kind.value} modules accept no state updates", field="state")


def create_app(config: ServiceConfig) -> FastAPI:
    """Build the service: loads (or builds) corpus + index, verifies the
    index fingerprint, and wires all endpoints."""
    corpus = ingest(config.corpus_path)
    if config.index_path and Path(config.index_path).exists():
        index = load_index(config.index_path, corpus)  # refuses stale indexes
    else:
        index = build_index(corpus)
        if config.index_path:
            save_index(index, config.index_path)
    state = AppState(corpus, index, config.data_dir)

    app = FastAPI(title="modoc", version=__version__)
    app.state.modoc = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ModocError)
    async def modoc_error_handler(_request: Request, exc: ModocError):
        status = _ERROR_STATUS.get(exc.code, 400)
        return JSONResponse(
            status_code=status,
            content={
                "error": {"code": exc.code, "message": exc.message, "details": exc.details}
            },
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_request: Request, exc: RequestValidationError):
        failed = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(loc) for loc in failed.get("loc", ()) if loc != "body")
        return JSONResponse(
            status_code=400,
            content={
                "error": {
                    "code": "InvalidRequest",
                    "message": f"malformed request body: {failed.get('msg', 'invalid')}",
                    "details": {"field": field},
                }
            },
        )

    # -- read endpoints -------------------------------------------------------

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "version": __version__,
            "document_count": len(state.corpus),
            "index_fingerprint": state.index.corpus_fingerprint,
            "embedder": state.index.embedder.to_dict(),
            "providers": [p.to_dict() for p in state.gateway.list_providers()],
        }

    @app.post("/search")
    def search(body: SearchBody):
        q = _parse_query_payload(body.query, body.context, body.limit)
        results = discover(state.index, q)
        return {"query": q.to_dict(), "results": [r.to_dict() for r in results]}

    @app.post("/align")
    def align_endpoint(body: AlignBody):
        hits = align(state.corpus, body.query_text, body.doc_id, _enum(Granularity, body.granularity, "granularity"))
        return {"hits": [h.to_dict() for h in hits]}

    @app.post("/keyphrases")
    def keyphrases_endpoint(body: KeyphrasesBody):
        q = _parse_query_payload(body.query) if body.query else Query()
        results = []
        for rank, doc_id in enumerate(body.doc_ids, start=1):
            if doc_id not in state.index.metadata:
                raise UnknownDocument(f"no document with id {doc_id!r}", doc_id=doc_id)
            meta = state.index.metadata[doc_id]
            results.append(
                SearchResult(
                    doc_id=doc_id,
                    score=0.0,
                    rank=rank,
                    matched_terms=(),
                    title=meta.title,
                    authors=meta.authors,
                    venue=meta.venue,
                    year=meta.year,
                )
            )
        phrases = suggest_keyphrases(state.index, state.corpus, results, q)
        return {"keyphrases": [p.to_dict() for p in phrases]}

    @app.get("/documents/{doc_id}")
    def get_document(doc_id: str):
        return _document_payload(state.corpus, doc_id)

    @app.get("/documents/{doc_id}/highlights")
    def document_highlights(doc_id: str, k: int = 5):
        hits = highlights(state.corpus, doc_id, k=k)
        return {"hits": [h.to_dict() for h in hits]}

    @app.get("/documents/{doc_id}/export")
    def document_export(doc_id: str, format: str = "bibtex"):
        if doc_id not in state.index.metadata:
            raise UnknownDocument(f"no document with id {doc_id!r}", doc_id=doc_id)
        meta = state.index.metadata[doc_id]
        entry = ReferenceEntry(
            number=1,
            doc_id=doc_id,
            title=meta.title,
            authors=meta.authors,
            venue=meta.venue,
            year=meta.year,
        )
        text = export_reference(entry, _enum(ExportFormat, format.lower(), "format"))
        return {"format": format.lower(), "text": text}

    @app.post("/parse-query")
    def parse_query(body: ParseQueryBody):
        if body.provider_id and body.provider_id != "stub":
            provider = state.gateway.get_provider(body.provider_id)
            result = state.gateway.generate(
                GenerationRequest(
                    kind=GenerationKind.QUERY_PARSE,
                    context=body.text,
                    provider_id=body.provider_id,
                ),
                provider,
            )
            q = parse_structured(result.text)
        else:
            q = parse_natural(body.text)
        return {"query": q.to_dict(), "canonical": format_query(q)}

    # -- generation -----------------------------------------------------------

    @app.post("/generate")
    def generate(body: GenerateBody):
        request = GenerationRequest(
            kind=_enum(GenerationKind, body.kind, "kind"),
            context=body.context,
            keywords=tuple(body.keywords),
            target_doc=body.target_doc,
            intent=_enum(CitationIntent, body.intent, "intent") if body.intent else None,
            history=tuple(ChatTurn(t.get("role", "user"), t.get("text", "")) for t in body.history),
            provider_id=body.provider_id,
        )
        return state.gateway.generate(request).to_dict()

    @app.get("/providers")
    def list_providers():
        return {"providers": [p.to_dict() for p in state.gateway.list_providers()]}

    @app.post("/providers")
    def register_provider(body: ProviderBody):
        provider = Provider(
            provider_id=body.provider_id,
            capabilities=frozenset(_enum(GenerationKind, k, "capabilities") for k in body.capabilities),
            base_url=body.base_url,
            credential_env=body.credential_env,
            timeout_seconds=body.timeout_seconds,
        )
        return state.gateway.register_provider(provider).to_dict()

    # -- workflows --------------------------------------------------------------

    @app.post("/workflows")
    def create_workflow(body: WorkflowBody):
        return state.new_workflow(body.preset).to_dict()

    @app.get("/workflows/{graph_id}")
    def get_workflow(graph_id: str):
        return state.get_workflow(graph_id).to_dict()

    @app.delete("/workflows/{graph_id}")
    def delete_workflow(graph_id: str):
        state.drop_workflow(graph_id)
        return {"deleted": graph_id}

    @app.post("/workflows/{graph_id}/modules")
    def add_module(graph_id: str, body: ModuleBody):
        with state.workflow_lock(graph_id):
            graph = state.get_workflow(graph_id)
            module_id = graph.add_module(_enum(ModuleKind, body.kind, "kind"))
        return {"module_id": module_id, "workflow": graph.to_dict()}

    @app.put("/workflows/{graph_id}/modules/{module_id}")
    def update_module(graph_id: str, module_id: str, body: ModuleUpdateBody):
        with state.workflow_lock(graph_id):
            graph = state.get_workflow(graph_id)
            node = graph.get_module(module_id)
            if body.unbind:
                graph.unbind_function(module_id)
            if body.bind_function:
                graph.bind_function(module_id, _enum(FunctionKind, body.bind_function, "bind_function"))
            if body.state:
                _apply_module_state(node, body.state, node.kind)
        return graph.to_dict()

    @app.delete("/workflows/{graph_id}/modules/{module_id}")
    def remove_module(graph_id: str, module_id: str):
        with state.workflow_lock(graph_id):
            graph = state.get_workflow(graph_id)
            graph.remove_module(module_id)
        return graph.to_dict()

    @app.post("/workflows/{graph_id}/links")
    def add_link(graph_id: str, body: LinkBody):
        with state.workflow_lock(graph_id):
            graph = state.get_workflow(graph_id)
            link = graph.add_link(body.from_module, body.to_module, body.slot)
        return {"link": link.to_dict(), "workflow": graph.to_dict()}

    @app.post("/workflows/{graph_id}/modules/{module_id}/fire")
    def fire_module(graph_id: str, module_id: str):
        with state.workflow_lock(graph_id):
            graph = state.get_workflow(graph_id)
            entry = graph.fire(module_id, state.services)
            return {"entry": entry.to_dict(), "module": graph.get_module(module_id).state.to_dict()}

    @app.post("/workflows/{graph_id}/fire")
    def fire_all(graph_id: str):
        with state.workflow_lock(graph_id):
            graph = state.get_workflow(graph_id)
            trace = graph.fire_all(state.services)
            return {"trace": [entry.to_dict() for entry in trace], "workflow": graph.to_dict()}

    @app.post("/workflows/{graph_id}/modules/{module_id}/clear-history")
    def clear_history(graph_id: str, module_id: str):
        with state.workflow_lock(graph_id):
            graph = state.get_workflow(graph_id)
            graph.clear_history(module_id)
        return graph.get_module(module_id).state.to_dict()

    # -- manuscripts -------------------------------------------------------------

    @app.post("/manuscripts")
    def create_manuscript(body: ManuscriptBody):
        ms = state.manuscripts.new(title=body.title, manuscript_id=body.manuscript_id)
        return ms.to_dict()

    @app.get("/manuscripts")
    def list_manuscripts():
        return {"manuscripts": state.manuscripts.list_ids()}

    @app.get("/manuscripts/{manuscript_id}")
    def get_manuscript(manuscript_id: str):
        return state.manuscripts.load(manuscript_id).to_dict()

    @app.put("/manuscripts/{manuscript_id}")
    def update_manuscript(manuscript_id: str, body: ManuscriptUpdateBody):
        ms = state.manuscripts.load(manuscript_id)
        if body.title is not None:
            ms.title = body.title
        if body.workflow_graph_ref is not None:
            ms.workflow_graph_ref = body.workflow_graph_ref
        state.manuscripts.save(ms)
        return ms.to_dict()

    @app.post("/manuscripts/{manuscript_id}/spans")
    def add_span(manuscript_id: str, body: SpanBody):
        if body.provenance not in ("user_typed", "extracted", "generated", "generated_unverified"):
            raise InvalidRequest(
                f"unknown provenance {body.provenance!r}", field="provenance"
            )
        ms = state.manuscripts.load(manuscript_id)
        if body.provenance in ("generated", "generated_unverified"):
            if not body.request_digest or body.request_digest not in state.gateway.audit:
                raise UnknownRequestDigest(
                    f"no audit record for digest {body.request_digest!r}",
                    request_digest=body.request_digest,
                )
            result = state.gateway.audit.get(body.request_digest)[-1]
            target_metadata = None
            if body.target_doc_id and body.target_doc_id in state.index.metadata:
                target_metadata = state.index.metadata[body.target_doc_id].to_dict()
            insert_generated(
                ms,
                body.position,
                result,
                state.gateway.audit,
                target_doc_id=body.target_doc_id,
                target_metadata=target_metadata,
            )
        else:
            if body.provenance == "extracted":
                if not body.source:
                    raise InvalidRequest("extracted spans need a source address", field="source")
                try:
                    provenance = Provenance.extracted(UnitAddress.from_dict(body.source))
                except (KeyError, TypeError, ValueError) as exc:
                    raise InvalidRequest(f"malformed source address: {exc}", field="source") from None
            else:
                provenance = Provenance.user_typed()
            if not body.text:
                raise InvalidRequest("span text is required", field="text")
            insert_span(ms, body.position, body.text, provenance, audit=state.gateway.audit)
        state.manuscripts.save(ms)
        return ms.to_dict()

    @app.put("/manuscripts/{manuscript_id}/spans/{span_idx}")
    def edit_span_endpoint(manuscript_id: str, span_idx: int, body: SpanEditBody):
        ms = state.manuscripts.load(manuscript_id)
        edit_span(ms, span_idx, body.text)
        state.manuscripts.save(ms)
        return ms.to_dict()

    @app.post("/manuscripts/{manuscript_id}/cite")
    def cite_endpoint(manuscript_id: str, body: CiteBody):
        ms = state.manuscripts.load(manuscript_id)
        if body.doc_id not in state.index.metadata:
            raise UnknownDocument(f"no document with id {body.doc_id!r}", doc_id=body.doc_id)
        cite(ms, body.position, body.doc_id, state.index.metadata[body.doc_id].to_dict())
        state.manuscripts.save(ms)
        return ms.to_dict()

    @app.post("/manuscripts/{manuscript_id}/spans/{span_idx}/verify")
    def verify_span_endpoint(manuscript_id: str, span_idx: int, body: VerifyBody):
        ms = state.manuscripts.load(manuscript_id)
        evidence = []
        for item in body.evidence:
            try:
                ref, score = item[0], float(item[1])
                if isinstance(ref, dict):
                    ref = UnitAddress.from_dict(ref)
            except (IndexError, KeyError, TypeError, ValueError) as exc:
                raise InvalidRequest(f"malformed evidence item: {exc}", field="evidence") from None
            evidence.append((ref, score))
        check = CheckRecord(
            method=_enum(CheckMethod, body.method, "method"),
            evidence=tuple(evidence),
            user_confirmed=body.user_confirmed,
            checked_at=datetime.now(timezone.utc).isoformat(),
        )
        verify_span(ms, span_idx, check)
        state.manuscripts.save(ms)
        return ms.to_dict()

    @app.get("/manuscripts/{manuscript_id}/ethics-report")
    def ethics_report_endpoint(manuscript_id: str):
        return ethics_report(state.manuscripts.load(manuscript_id))

    @app.get("/manuscripts/{manuscript_id}/references/{number}/export")
    def export_reference_endpoint(manuscript_id: str, number: int, format: str = "bibtex"):
        ms = state.manuscripts.load(manuscript_id)
        entry = next((r for r in ms.references if r.number == number), None)
        if entry is None:
            raise InvalidRequest(f"no reference numbered {number}", field="number")
        text = export_reference(entry, _enum(ExportFormat, format.lower(), "format"))
        return {"format": format.lower(), "text": text}

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted."""
    import uvicorn

    from .errors import PortInUse

    app = create_app(config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    except OSError as exc:
        raise PortInUse(f"cannot bind {config.host}:{config.port}: {exc}") from exc
