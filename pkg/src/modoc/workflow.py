"""Typed module graph with single-function modules and acyclic links.

Five module kinds (Keywords, Discovery, Read, Write, Generation) each host
at most one function; directed links feed one module's content into a named
input slot of another's function. The graph rejects any link that would
close a loop, and firing a function writes output into the host module's
state only, so a workflow can be re-executed indefinitely as inputs change.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from enum import Enum

from .corpus import Corpus, Granularity, UnitAddress
from .errors import (
    FunctionAlreadyBound,
    KindMismatch,
    MissingRequiredInput,
    ModocError,
    NoFunctionBound,
    ServiceError,
    SlotOccupied,
    SlotUnknown,
    SourceKindRejected,
    UnknownModule,
    WouldCreateCycle,
)
from .generation import (
    ChatTurn,
    CitationIntent,
    GenerationGateway,
    GenerationKind,
    GenerationRequest,
    GenerationResult,
)
from .index import Index
from .manuscript import ManuscriptStore
from .query import Query, QueryParserProvider, QueryTerm, format_query, parse_natural
from .retrieval import AlignmentHit, Keyphrase, SearchResult, align, discover, highlights, suggest_keyphrases


class ModuleKind(str, Enum):
    KEYWORDS = "keywords"
    DISCOVERY = "discovery"
    READ = "read"
    WRITE = "write"
    GENERATION = "generation"


class FunctionKind(str, Enum):
    DISCOVER = "discover"
    ALIGN = "align"
    HIGHLIGHTS = "highlights"
    SUGGEST_KEYPHRASES = "suggest_keyphrases"
    PARSE_NATURAL = "parse_natural"
    GENERATE_CITATION = "generate_citation"
    GENERATE_CONCLUSION = "generate_conclusion"
    ASSISTANT = "assistant"


HOSTABLE_FUNCTIONS: dict[ModuleKind, frozenset[FunctionKind]] = {
    ModuleKind.KEYWORDS: frozenset({FunctionKind.SUGGEST_KEYPHRASES, FunctionKind.PARSE_NATURAL}),
    ModuleKind.DISCOVERY: frozenset({FunctionKind.DISCOVER}),
    ModuleKind.READ: frozenset({FunctionKind.ALIGN, FunctionKind.HIGHLIGHTS}),
    ModuleKind.WRITE: frozenset(),
    ModuleKind.GENERATION: frozenset(
        {FunctionKind.GENERATE_CITATION, FunctionKind.GENERATE_CONCLUSION, FunctionKind.ASSISTANT}
    ),
}


@dataclass(frozen=True)
class SlotSpec:
    required: bool
    accepted_source_kinds: frozenset[ModuleKind]


def _slot(required: bool, *kinds: ModuleKind) -> SlotSpec:
    return SlotSpec(required=required, accepted_source_kinds=frozenset(kinds))


# Fixed per function. Discover's two slots are individually optional but at
# least one must carry content at fire time.
SLOT_SPECS: dict[FunctionKind, dict[str, SlotSpec]] = {
    FunctionKind.DISCOVER: {
        "query": _slot(False, ModuleKind.KEYWORDS),
        "context": _slot(False, ModuleKind.WRITE, ModuleKind.READ, ModuleKind.GENERATION),
    },
    FunctionKind.ALIGN: {
        "alignment_source": _slot(True, ModuleKind.WRITE, ModuleKind.READ, ModuleKind.GENERATION),
    },
    FunctionKind.HIGHLIGHTS: {},
    FunctionKind.SUGGEST_KEYPHRASES: {
        "target_results": _slot(True, ModuleKind.DISCOVERY),
    },
    FunctionKind.PARSE_NATURAL: {
        "text": _slot(True, ModuleKind.KEYWORDS),
    },
    FunctionKind.GENERATE_CITATION: {
        "context": _slot(True, ModuleKind.WRITE),
        "target_results": _slot(True, ModuleKind.DISCOVERY),
        "keywords": _slot(False, ModuleKind.KEYWORDS),
    },
    FunctionKind.GENERATE_CONCLUSION: {
        "premise": _slot(True, ModuleKind.WRITE, ModuleKind.READ),
        "keywords": _slot(False, ModuleKind.KEYWORDS),
    },
    FunctionKind.ASSISTANT: {},
}


class WriteScope(str, Enum):
    SELECTION = "selection"
    MANUSCRIPT = "manuscript"


@dataclass
class KeywordsState:
    query: Query | None = None
    free_text: str = ""
    suggestions: list[Keyphrase] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "query": self.query.to_dict() if self.query else None,
            "free_text": self.free_text,
            "suggestions": [k.to_dict() for k in self.suggestions],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KeywordsState":
        return cls(
            query=Query.from_dict(data["query"]) if data.get("query") else None,
            free_text=data.get("free_text", ""),
            suggestions=[Keyphrase(**k) for k in data.get("suggestions", [])],
        )


@dataclass
class DiscoveryState:
    results: list[SearchResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"results": [r.to_dict() for r in self.results]}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscoveryState":
        results = []
        for r in data.get("results", []):
            meta = r.get("metadata", {})
            results.append(
                SearchResult(
                    doc_id=r["doc_id"],
                    score=r["score"],
                    rank=r["rank"],
                    matched_terms=tuple(QueryTerm.from_dict(t) for t in r.get("matched_terms", [])),
                    title=meta.get("title", ""),
                    authors=tuple(a["full_name"] for a in meta.get("authors", [])),
                    venue=meta.get("venue", ""),
                    year=meta.get("year"),
                )
            )
        return cls(results=results)


@dataclass
class ReadState:
    doc_id: str | None = None
    display_scope: str = "document"
    granularity: Granularity = Granularity.SENTENCE
    selection: str = ""
    hits: list[AlignmentHit] = field(default_factory=list)
    highlight_count: int = 5

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "display_scope": self.display_scope,
            "granularity": self.granularity.value,
            "selection": self.selection,
            "hits": [h.to_dict() for h in self.hits],
            "highlight_count": self.highlight_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReadState":
        return cls(
            doc_id=data.get("doc_id"),
            display_scope=data.get("display_scope", "document"),
            granularity=Granularity(data.get("granularity", "sentence")),
            selection=data.get("selection", ""),
            hits=[
                AlignmentHit(
                    address=UnitAddress.from_dict(h["address"]),
                    text=h["text"],
                    score=h["score"],
                    rank=h["rank"],
                )
                for h in data.get("hits", [])
            ],
            highlight_count=data.get("highlight_count", 5),
        )


@dataclass
class WriteState:
    manuscript_id: str | None = None
    selection: str = ""
    scope: WriteScope = WriteScope.SELECTION

    def to_dict(self) -> dict:
        return {
            "manuscript_id": self.manuscript_id,
            "selection": self.selection,
            "scope": self.scope.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WriteState":
        return cls(
            manuscript_id=data.get("manuscript_id"),
            selection=data.get("selection", ""),
            scope=WriteScope(data.get("scope", "selection")),
        )


@dataclass
class GenerationState:
    provider_id: str = "stub"
    intent: CitationIntent | None = None
    target_doc_id: str | None = None
    prompt: str = ""
    last_result: GenerationResult | None = None
    history: list[ChatTurn] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "provider_id": self.provider_id,
            "intent": self.intent.value if self.intent else None,
            "target_doc_id": self.target_doc_id,
            "prompt": self.prompt,
            "last_result": self.last_result.to_dict() if self.last_result else None,
            "history": [{"role": t.role, "text": t.text} for t in self.history],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationState":
        last = data.get("last_result")
        return cls(
            provider_id=data.get("provider_id", "stub"),
            intent=CitationIntent(data["intent"]) if data.get("intent") else None,
            target_doc_id=data.get("target_doc_id"),
            prompt=data.get("prompt", ""),
            last_result=GenerationResult(
                text=last["text"],
                kind=GenerationKind(last["kind"]),
                provider_id=last["provider_id"],
                request_digest=last["request_digest"],
                created_at=last["created_at"],
                markers=tuple(last.get("markers", [])),
            )
            if last
            else None,
            history=[ChatTurn(role=t["role"], text=t["text"]) for t in data.get("history", [])],
        )


_STATE_FACTORY = {
    ModuleKind.KEYWORDS: KeywordsState,
    ModuleKind.DISCOVERY: DiscoveryState,
    ModuleKind.READ: ReadState,
    ModuleKind.WRITE: WriteState,
    ModuleKind.GENERATION: GenerationState,
}


@dataclass
class ModuleNode:
    module_id: str
    kind: ModuleKind
    function: FunctionKind | None = None
    state: object = None

    def __post_init__(self) -> None:
        if self.state is None:
            self.state = _STATE_FACTORY[self.kind]()


@dataclass(frozen=True)
class Link:
    from_module: str
    to_module: str
    input_slot: str

    def to_dict(self) -> dict:
        return {"from": self.from_module, "to": self.to_module, "slot": self.input_slot}


@dataclass
class TraceEntry:
    module_id: str
    function: FunctionKind
    input_digests: dict[str, str]
    output_digest: str | None
    wall_time_ms: float
    status: str = "ok"  # ok | skipped | error
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "module_id": self.module_id,
            "function": self.function.value,
            "input_digests": dict(self.input_digests),
            "output_digest": self.output_digest,
            "wall_time_ms": self.wall_time_ms,
            "status": self.status,
            "error": self.error,
        }


@dataclass
class Services:
    """Everything a fire needs to reach outside the graph."""

    corpus: Corpus
    index: Index
    gateway: GenerationGateway
    manuscripts: ManuscriptStore | None = None
    query_parser: QueryParserProvider | None = None


def content_digest(content) -> str:
    canonical = _canonical_content(content)
    payload = json.dumps(canonical, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _canonical_content(content):
    if content is None or isinstance(content, (str, int, float, bool)):
        return content
    if isinstance(content, Query):
        return format_query(content)
    if isinstance(content, (list, tuple)):
        return [_canonical_content(item) for item in content]
    if isinstance(content, (SearchResult, AlignmentHit, Keyphrase)):
        return content.to_dict()
    if isinstance(content, dict):
        return {k: _canonical_content(v) for k, v in content.items()}
    raise TypeError(f"cannot canonicalize {type(content).__name__}")


def _content_is_empty(content) -> bool:
    if content is None:
        return True
    if isinstance(content, str):
        return not content.strip()
    if isinstance(content, Query):
        return not content.terms and not content.context_text
    if isinstance(content, (list, tuple)):
        return len(content) == 0
    return False


class WorkflowGraph:
    """Mutable module/link graph; acyclicity is re-established as an
    invariant by every accepted mutation."""

    def __init__(self, graph_id: str = "") -> None:
        self.graph_id = graph_id
        self.modules: dict[str, ModuleNode] = {}
        self.links: list[Link] = []
        self._kind_counters: dict[ModuleKind, int] = {}

    # -- structure ----------------------------------------------------------

    def add_module(self, kind: ModuleKind, module_id: str | None = None) -> str:
        if module_id is None:
            count = self._kind_counters.get(kind, 0) + 1
            self._kind_counters[kind] = count
            module_id = f"{kind.value}-{count}"
        else:
            # Keep generated ids clear of explicitly restored ones.
            prefix = f"{kind.value}-"
            if module_id.startswith(prefix) and module_id[len(prefix):].isdigit():
                self._kind_counters[kind] = max(
                    self._kind_counters.get(kind, 0), int(module_id[len(prefix):])
                )
        if module_id in self.modules:
            raise ValueError(f"module id {module_id!r} already exists")
        self.modules[module_id] = ModuleNode(module_id=module_id, kind=kind)
        return module_id

    def get_module(self, module_id: str) -> ModuleNode:
        node = self.modules.get(module_id)
        if node is None:
            raise UnknownModule(f"no module with id {module_id!r}", module_id=module_id)
        return node

    def remove_module(self, module_id: str) -> None:
        self.get_module(module_id)
        del self.modules[module_id]
        self.links = [
            l for l in self.links if module_id not in (l.from_module, l.to_module)
        ]

    def bind_function(self, module_id: str, function: FunctionKind) -> None:
        node = self.get_module(module_id)
        if node.function is not None:
            raise FunctionAlreadyBound(
                f"module {module_id!r} already hosts {node.function.value}",
                module_id=module_id,
            )
        if function not in HOSTABLE_FUNCTIONS[node.kind]:
            raise KindMismatch(
                f"a {node.kind.value} module cannot host {function.value}",
                module_id=module_id,
                function=function.value,
            )
        node.function = function

    def unbind_function(self, module_id: str) -> None:
        node = self.get_module(module_id)
        node.function = None
        # Incoming links reference slots of the dropped function.
        self.links = [l for l in self.links if l.to_module != module_id]

    def _reachable(self, start: str, goal: str) -> bool:
        stack = [start]
        seen = set()
        while stack:
            current = stack.pop()
            if current == goal:
                return True
            if current in seen:
                continue
            seen.add(current)
            stack.extend(l.to_module for l in self.links if l.from_module == current)
        return False

    def add_link(self, from_module: str, to_module: str, input_slot: str) -> Link:
        """Add a link; any rejection leaves the graph untouched."""
        source = self.get_module(from_module)
        target = self.get_module(to_module)
        if target.function is None:
            raise SlotUnknown(
                f"module {to_module!r} hosts no function, so declares no slots",
                module_id=to_module,
            )
        spec = SLOT_SPECS[target.function].get(input_slot)
        if spec is None:
            raise SlotUnknown(
                f"{target.function.value} declares no slot {input_slot!r}",
                module_id=to_module,
                slot=input_slot,
            )
        if source.kind not in spec.accepted_source_kinds:
            raise SourceKindRejected(
                f"slot {input_slot!r} of {target.function.value} does not accept "
                f"{source.kind.value} sources",
                slot=input_slot,
                source_kind=source.kind.value,
            )
        if any(l.to_module == to_module and l.input_slot == input_slot for l in self.links):
            raise SlotOccupied(
                f"slot {input_slot!r} of module {to_module!r} already has a provider",
                module_id=to_module,
                slot=input_slot,
            )
        if from_module == to_module or self._reachable(to_module, from_module):
            raise WouldCreateCycle(
                f"link {from_module!r} -> {to_module!r} would close a loop",
                from_module=from_module,
                to_module=to_module,
            )
        link = Link(from_module=from_module, to_module=to_module, input_slot=input_slot)
        self.links.append(link)
        return link

    def remove_link(self, from_module: str, to_module: str, input_slot: str) -> None:
        before = len(self.links)
        self.links = [
            l
            for l in self.links
            if not (
                l.from_module == from_module
                and l.to_module == to_module
                and l.input_slot == input_slot
            )
        ]
        if len(self.links) == before:
            raise UnknownModule(
                f"no link {from_module!r} -> {to_module!r} slot {input_slot!r}"
            )

    def clear_history(self, module_id: str) -> None:
        node = self.get_module(module_id)
        if node.kind is not ModuleKind.GENERATION:
            raise KindMismatch(
                f"module {module_id!r} is {node.kind.value}, not generation",
                module_id=module_id,
            )
        node.state.history = []

    def topological_order(self) -> list[str]:
        """Kahn's algorithm; ready modules drain in ascending module id."""
        indegree = {mid: 0 for mid in self.modules}
        for link in self.links:
            indegree[link.to_module] += 1
        ready = sorted(mid for mid, deg in indegree.items() if deg == 0)
        order: list[str] = []
        while ready:
            current = ready.pop(0)
            order.append(current)
            for link in self.links:
                if link.from_module != current:
                    continue
                indegree[link.to_module] -= 1
                if indegree[link.to_module] == 0:
                    ready.append(link.to_module)
            ready.sort()
        if len(order) != len(self.modules):
            raise WouldCreateCycle("graph contains a cycle")  # unreachable by construction
        return order

    def deep_state(self) -> dict:
        """Full per-module state snapshot, for change auditing and tests."""
        return {mid: node.state.to_dict() for mid, node in sorted(self.modules.items())}

    def to_dict(self) -> dict:
        return {
            "graph_id": self.graph_id,
            "modules": [
                {
                    "module_id": node.module_id,
                    "kind": node.kind.value,
                    "function": node.function.value if node.function else None,
                    "state_ref": content_digest(node.state.to_dict()),
                    "state": node.state.to_dict(),
                }
                for node in self.modules.values()
            ],
            "links": [l.to_dict() for l in self.links],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WorkflowGraph":
        graph = cls(graph_id=data.get("graph_id", ""))
        for entry in data["modules"]:
            kind = ModuleKind(entry["kind"])
            graph.add_module(kind, module_id=entry["module_id"])
            node = graph.modules[entry["module_id"]]
            if entry.get("function"):
                graph.bind_function(entry["module_id"], FunctionKind(entry["function"]))
            if entry.get("state") is not None:
                node.state = _STATE_FACTORY[kind].from_dict(entry["state"])
        for link in data.get("links", []):
            graph.add_link(link["from"], link["to"], link["slot"])
        return graph

    # -- execution ----------------------------------------------------------

    def _provided_content(self, node: ModuleNode, slot: str, services: Services):
        """Content a source module hands to a consumer slot."""
        if node.kind is ModuleKind.WRITE:
            state: WriteState = node.state
            if state.scope is WriteScope.SELECTION:
                return state.selection
            if state.manuscript_id and services.manuscripts is not None:
                return services.manuscripts.load(state.manuscript_id).full_text()
            return ""
        if node.kind is ModuleKind.READ:
            return node.state.selection
        if node.kind is ModuleKind.GENERATION:
            result = node.state.last_result
            return result.text if result else ""
        if node.kind is ModuleKind.KEYWORDS:
            if slot == "text":
                return node.state.free_text
            return node.state.query
        if node.kind is ModuleKind.DISCOVERY:
            return list(node.state.results)
        raise ServiceError(f"module kind {node.kind.value} provides no content")

    def _gather_inputs(self, node: ModuleNode, services: Services) -> dict[str, object]:
        specs = SLOT_SPECS[node.function]
        inputs: dict[str, object] = {}
        for slot, spec in specs.items():
            link = next(
                (l for l in self.links if l.to_module == node.module_id and l.input_slot == slot),
                None,
            )
            content = None
            if link is not None:
                content = self._provided_content(self.modules[link.from_module], slot, services)
            if _content_is_empty(content):
                if spec.required:
                    raise MissingRequiredInput(
                        f"slot {slot!r} of module {node.module_id!r} has no content",
                        module_id=node.module_id,
                        slot=slot,
                    )
                continue
            inputs[slot] = content
        if node.function is FunctionKind.DISCOVER and not inputs:
            raise MissingRequiredInput(
                f"discover on {node.module_id!r} needs content in 'query' or 'context'",
                module_id=node.module_id,
                slot="query|context",
            )
        return inputs

    def _execute(self, node: ModuleNode, inputs: dict[str, object], services: Services):
        fn = node.function
        if fn is FunctionKind.DISCOVER:
            base: Query = inputs.get("query") or Query()
            q = base.with_context(inputs.get("context")) if "context" in inputs else base
            results = discover(services.index, q)
            node.state.results = results
            return results
        if fn is FunctionKind.ALIGN:
            hits = align(
                services.corpus,
                inputs["alignment_source"],
                node.state.doc_id,
                node.state.granularity,
            )
            node.state.hits = hits
            return hits
        if fn is FunctionKind.HIGHLIGHTS:
            hits = highlights(services.corpus, node.state.doc_id, node.state.highlight_count)
            node.state.hits = hits
            return hits
        if fn is FunctionKind.SUGGEST_KEYPHRASES:
            q = node.state.query or Query()
            phrases = suggest_keyphrases(
                services.index, services.corpus, inputs["target_results"], q
            )
            node.state.suggestions = phrases
            return phrases
        if fn is FunctionKind.PARSE_NATURAL:
            parsed = parse_natural(inputs["text"], services.query_parser)
            node.state.query = parsed
            return parsed
        if fn is FunctionKind.GENERATE_CITATION:
            results: list[SearchResult] = inputs["target_results"]
            target_doc = node.state.target_doc_id or results[0].doc_id
            request = GenerationRequest(
                kind=GenerationKind.CITATION,
                context=inputs["context"],
                keywords=_keyword_strings(inputs.get("keywords")),
                target_doc=target_doc,
                intent=node.state.intent,
                provider_id=node.state.provider_id,
            )
            result = services.gateway.generate(request)
            node.state.last_result = result
            return result.text
        if fn is FunctionKind.GENERATE_CONCLUSION:
            request = GenerationRequest(
                kind=GenerationKind.CONCLUSION,
                context=inputs["premise"],
                keywords=_keyword_strings(inputs.get("keywords")),
                provider_id=node.state.provider_id,
            )
            result = services.gateway.generate(request)
            node.state.last_result = result
            return result.text
        if fn is FunctionKind.ASSISTANT:
            request = GenerationRequest(
                kind=GenerationKind.ASSISTANT,
                context=node.state.prompt,
                history=tuple(node.state.history),
                provider_id=node.state.provider_id,
            )
            result = services.gateway.generate(request)
            node.state.history = node.state.history + [
                ChatTurn(role="user", text=node.state.prompt),
                ChatTurn(role="assistant", text=result.text),
            ]
            node.state.last_result = result
            return result.text
        raise ServiceError(f"unknown function {fn}")

    def fire(self, module_id: str, services: Services) -> TraceEntry:
        """Run one module's function; output lands only in that module."""
        node = self.get_module(module_id)
        if node.function is None:
            raise NoFunctionBound(f"module {module_id!r} hosts no function", module_id=module_id)
        inputs = self._gather_inputs(node, services)
        input_digests = {slot: content_digest(content) for slot, content in inputs.items()}
        started = time.perf_counter()
        try:
            output = self._execute(node, inputs, services)
        except ModocError:
            raise
        except Exception as exc:  # defensive: surface as a service fault
            raise ServiceError(f"{node.function.value} failed: {exc}") from exc
        return TraceEntry(
            module_id=module_id,
            function=node.function,
            input_digests=input_digests,
            output_digest=content_digest(output),
            wall_time_ms=(time.perf_counter() - started) * 1000.0,
        )

    def fire_all(self, services: Services) -> list[TraceEntry]:
        """Run every bound function once, in topological order, snapshotting
        each module's inputs at its own execution time. Modules without
        content in a required slot are recorded as skipped; per-module errors
        are recorded and do not stop the sweep."""
        trace: list[TraceEntry] = []
        for module_id in self.topological_order():
            node = self.modules[module_id]
            if node.function is None:
                continue
            try:
                trace.append(self.fire(module_id, services))
            except MissingRequiredInput as exc:
                trace.append(
                    TraceEntry(
                        module_id=module_id,
                        function=node.function,
                        input_digests={},
                        output_digest=None,
                        wall_time_ms=0.0,
                        status="skipped",
                        error=exc.message,
                    )
                )
            except ModocError as exc:
                trace.append(
                    TraceEntry(
                        module_id=module_id,
                        function=node.function,
                        input_digests={},
                        output_digest=None,
                        wall_time_ms=0.0,
                        status="error",
                        error=f"{exc.code}: {exc.message}",
                    )
                )
        return trace


def _keyword_strings(query: Query | None) -> tuple[str, ...]:
    if query is None:
        return ()
    return tuple(term.text for term in query.terms if not term.negated)


class PresetName(str, Enum):
    RECALL_AND_CITE = "recall_and_cite"
    DISCOVER_AND_CITE = "discover_and_cite"
    CITE_AND_CHECK = "cite_and_check"
    GENERATE_AND_COPY = "generate_and_copy"
    GENERATE_AND_CHECK = "generate_and_check"


def preset(name: PresetName | str, graph_id: str = "") -> WorkflowGraph:
    """Pre-wired workflow graphs for the five standard workflows."""
    name = PresetName(name)
    graph = WorkflowGraph(graph_id=graph_id)
    write = graph.add_module(ModuleKind.WRITE)
    keywords = graph.add_module(ModuleKind.KEYWORDS)

    if name in (
        PresetName.RECALL_AND_CITE,
        PresetName.DISCOVER_AND_CITE,
        PresetName.CITE_AND_CHECK,
    ):
        discovery = graph.add_module(ModuleKind.DISCOVERY)
        graph.bind_function(discovery, FunctionKind.DISCOVER)
        graph.add_link(keywords, discovery, "query")
        graph.add_link(write, discovery, "context")
        if name is PresetName.DISCOVER_AND_CITE:
            read = graph.add_module(ModuleKind.READ)
            graph.bind_function(read, FunctionKind.HIGHLIGHTS)
        elif name is PresetName.CITE_AND_CHECK:
            read = graph.add_module(ModuleKind.READ)
            graph.bind_function(read, FunctionKind.ALIGN)
            graph.add_link(write, read, "alignment_source")
        return graph

    generation = graph.add_module(ModuleKind.GENERATION)
    graph.bind_function(generation, FunctionKind.GENERATE_CONCLUSION)
    graph.add_link(write, generation, "premise")
    graph.add_link(keywords, generation, "keywords")
    if name is PresetName.GENERATE_AND_CHECK:
        discovery = graph.add_module(ModuleKind.DISCOVERY)
        graph.bind_function(discovery, FunctionKind.DISCOVER)
        graph.add_link(generation, discovery, "context")
        read = graph.add_module(ModuleKind.READ)
        graph.bind_function(read, FunctionKind.ALIGN)
        graph.add_link(generation, read, "alignment_source")
    return graph
