// Wire payload shapes, mirroring the service's JSON exactly. The client
// renders these untouched: scores, ranks, marker numbers, and provenance
// states always come from the server.

export interface QueryTermWire {
  field: string;
  text: string;
  negated: boolean;
}

export interface QueryWire {
  terms: QueryTermWire[];
  year_range: [number, number] | null;
  context_text: string | null;
  limit: number;
}

export interface DocMetadataWire {
  title: string;
  authors: { full_name: string }[];
  venue: string;
  year: number | null;
}

export interface SearchResultWire {
  doc_id: string;
  score: number;
  rank: number;
  matched_terms: QueryTermWire[];
  metadata: DocMetadataWire;
}

export interface UnitAddressWire {
  doc_id: string;
  granularity: string;
  section_idx: number | null;
  paragraph_idx: number | null;
  sentence_idx: number | null;
}

export interface AlignmentHitWire {
  address: UnitAddressWire;
  text: string;
  score: number;
  rank: number;
}

export interface KeyphraseWire {
  phrase: string;
  score: number;
}

export interface DocumentWire {
  id: string;
  title: string;
  authors: { full_name: string }[];
  venue: string;
  year: number | null;
  abstract: string;
  sections: { title: string; paragraphs: string[][] }[];
}

export interface GenerationResultWire {
  text: string;
  kind: string;
  provider_id: string;
  request_digest: string;
  created_at: string;
  markers: number[];
}

export interface ProviderWire {
  provider_id: string;
  capabilities: string[];
  base_url: string;
  credential_env: string;
  timeout_seconds: number;
}

export interface HealthWire {
  status: string;
  version: string;
  document_count: number;
  index_fingerprint: string;
  embedder: Record<string, unknown>;
  providers: ProviderWire[];
}

export interface ModuleWire {
  module_id: string;
  kind: string;
  function: string | null;
  state_ref: string;
  state: Record<string, unknown>;
}

export interface LinkWire {
  from: string;
  to: string;
  slot: string;
}

export interface WorkflowWire {
  graph_id: string;
  modules: ModuleWire[];
  links: LinkWire[];
}

export interface TraceEntryWire {
  module_id: string;
  function: string;
  input_digests: Record<string, string>;
  output_digest: string | null;
  wall_time_ms: number;
  status: "ok" | "skipped" | "error";
  error: string | null;
}

export interface ProvenanceWire {
  kind: "user_typed" | "extracted" | "generated_unverified" | "generated_verified";
  source?: UnitAddressWire;
  request_digest?: string;
  provider_id?: string;
  checks?: unknown[];
}

export interface SpanWire {
  text: string;
  provenance: ProvenanceWire;
  citation_marker: number | null;
  created_at: string;
}

export interface ReferenceWire {
  number: number;
  doc_id: string;
  metadata: DocMetadataWire;
}

export interface ManuscriptWire {
  format_version: number;
  manuscript_id: string;
  title: string;
  spans: SpanWire[];
  references: ReferenceWire[];
  workflow_graph_ref: string | null;
  updated_at: string;
}

export interface EthicsFindingWire {
  span_idx: number;
  excerpt: string;
  provider_id: string;
  request_digest: string;
  inserted_at: string;
  age_seconds: number | null;
}

export interface EthicsReportWire {
  manuscript_id: string;
  clean: boolean;
  findings: EthicsFindingWire[];
  counts: Record<string, number>;
  policy: string;
}

export interface ApiErrorWire {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly details: Record<string, unknown>;

  constructor(status: number, wire: ApiErrorWire) {
    super(`${wire.code}: ${wire.message}`);
    this.code = wire.code;
    this.status = status;
    this.details = wire.details ?? {};
  }
}
