"""modoc: a desk-scale scientific writing workbench.

Extractive retrieval (discovery, alignment, keyphrases, highlights) and
abstractive generation live behind one module workflow graph with span-level
manuscript provenance, served over HTTP and a batch CLI.
"""

from .corpus import (
    Corpus,
    Document,
    Granularity,
    Section,
    UnitAddress,
    enumerate_units,
    ingest,
    resolve,
    split_sentences,
)
from .embedding import Embedding, EmbedderSpec, centroid, cosine, embed, tokenize
from .errors import ModocError
from .generation import (
    AuditLog,
    ChatTurn,
    CitationIntent,
    GenerationGateway,
    GenerationKind,
    GenerationRequest,
    GenerationResult,
    Provider,
)
from .index import Index, build_index, corpus_fingerprint, load_index, save_index
from .manuscript import (
    CheckMethod,
    CheckRecord,
    ExportFormat,
    Manuscript,
    ManuscriptSpan,
    ManuscriptStore,
    Provenance,
    ProvenanceKind,
    ReferenceEntry,
    cite,
    edit_span,
    ethics_report,
    export_reference,
    insert_generated,
    insert_span,
    verify_span,
)
from .query import (
    Field,
    Query,
    QueryTerm,
    RuleBasedQueryParser,
    format_query,
    parse_natural,
    parse_structured,
)
from .retrieval import (
    AlignmentHit,
    Keyphrase,
    SearchResult,
    align,
    discover,
    highlights,
    suggest_keyphrases,
)
from .workflow import (
    FunctionKind,
    Link,
    ModuleKind,
    ModuleNode,
    PresetName,
    Services,
    TraceEntry,
    WorkflowGraph,
    WriteScope,
    preset,
)

__version__ = "0.1.0"
