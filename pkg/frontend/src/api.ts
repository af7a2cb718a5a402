// Thin typed client over the service's HTTP endpoints. Every method is a
// single request; no caching, no local recomputation of anything the
// server already decided.

import {
  AlignmentHitWire,
  ApiError,
  DocumentWire,
  EthicsReportWire,
  GenerationResultWire,
  HealthWire,
  KeyphraseWire,
  ManuscriptWire,
  ProviderWire,
  QueryWire,
  SearchResultWire,
  TraceEntryWire,
  WorkflowWire,
} from "./types.js";

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload.error ?? {
        code: "ServiceError",
        message: `unexpected ${response.status} response`,
        details: {},
      });
    }
    return payload as T;
  }

  health(): Promise<HealthWire> {
    return this.request("GET", "/health");
  }

  search(body: {
    query?: string | QueryWire;
    context?: string;
    limit?: number;
  }): Promise<{ query: QueryWire; results: SearchResultWire[] }> {
    return this.request("POST", "/search", body);
  }

  align(body: {
    doc_id: string;
    query_text: string;
    granularity: string;
  }): Promise<{ hits: AlignmentHitWire[] }> {
    return this.request("POST", "/align", body);
  }

  keyphrases(docIds: string[], query?: string | QueryWire): Promise<{ keyphrases: KeyphraseWire[] }> {
    return this.request("POST", "/keyphrases", { doc_ids: docIds, query });
  }

  document(docId: string): Promise<DocumentWire> {
    return this.request("GET", `/documents/${encodeURIComponent(docId)}`);
  }

  highlights(docId: string, k = 5): Promise<{ hits: AlignmentHitWire[] }> {
    return this.request("GET", `/documents/${encodeURIComponent(docId)}/highlights?k=${k}`);
  }

  parseQuery(text: string, providerId?: string): Promise<{ query: QueryWire; canonical: string }> {
    return this.request("POST", "/parse-query", { text, provider_id: providerId });
  }

  generate(body: {
    kind: string;
    context?: string;
    keywords?: string[];
    target_doc?: string;
    intent?: string;
    provider_id?: string;
  }): Promise<GenerationResultWire> {
    return this.request("POST", "/generate", body);
  }

  providers(): Promise<{ providers: ProviderWire[] }> {
    return this.request("GET", "/providers");
  }

  createWorkflow(preset?: string): Promise<WorkflowWire> {
    return this.request("POST", "/workflows", preset ? { preset } : {});
  }

  workflow(graphId: string): Promise<WorkflowWire> {
    return this.request("GET", `/workflows/${graphId}`);
  }

  addModule(graphId: string, kind: string): Promise<{ module_id: string; workflow: WorkflowWire }> {
    return this.request("POST", `/workflows/${graphId}/modules`, { kind });
  }

  updateModule(
    graphId: string,
    moduleId: string,
    body: { bind_function?: string; unbind?: boolean; state?: Record<string, unknown> },
  ): Promise<WorkflowWire> {
    return this.request("PUT", `/workflows/${graphId}/modules/${moduleId}`, body);
  }

  addLink(graphId: string, from: string, to: string, slot: string): Promise<{ workflow: WorkflowWire }> {
    return this.request("POST", `/workflows/${graphId}/links`, { from, to, slot });
  }

  fireModule(
    graphId: string,
    moduleId: string,
  ): Promise<{ entry: TraceEntryWire; module: Record<string, unknown> }> {
    return this.request("POST", `/workflows/${graphId}/modules/${moduleId}/fire`);
  }

  fireAll(graphId: string): Promise<{ trace: TraceEntryWire[]; workflow: WorkflowWire }> {
    return this.request("POST", `/workflows/${graphId}/fire`);
  }

  clearHistory(graphId: string, moduleId: string): Promise<Record<string, unknown>> {
    return this.request("POST", `/workflows/${graphId}/modules/${moduleId}/clear-history`);
  }

  createManuscript(title: string): Promise<ManuscriptWire> {
    return this.request("POST", "/manuscripts", { title });
  }

  manuscript(manuscriptId: string): Promise<ManuscriptWire> {
    return this.request("GET", `/manuscripts/${manuscriptId}`);
  }

  updateManuscript(
    manuscriptId: string,
    body: { title?: string; workflow_graph_ref?: string },
  ): Promise<ManuscriptWire> {
    return this.request("PUT", `/manuscripts/${manuscriptId}`, body);
  }

  insertSpan(
    manuscriptId: string,
    body: {
      position: number;
      provenance: string;
      text?: string;
      source?: Record<string, unknown>;
      request_digest?: string;
      target_doc_id?: string;
    },
  ): Promise<ManuscriptWire> {
    return this.request("POST", `/manuscripts/${manuscriptId}/spans`, body);
  }

  editSpan(manuscriptId: string, spanIdx: number, text: string): Promise<ManuscriptWire> {
    return this.request("PUT", `/manuscripts/${manuscriptId}/spans/${spanIdx}`, { text });
  }

  cite(manuscriptId: string, position: number, docId: string): Promise<ManuscriptWire> {
    return this.request("POST", `/manuscripts/${manuscriptId}/cite`, {
      position,
      doc_id: docId,
    });
  }

  verifySpan(
    manuscriptId: string,
    spanIdx: number,
    body: { method: string; evidence: [unknown, number][]; user_confirmed: boolean },
  ): Promise<ManuscriptWire> {
    return this.request("POST", `/manuscripts/${manuscriptId}/spans/${spanIdx}/verify`, body);
  }

  ethicsReport(manuscriptId: string): Promise<EthicsReportWire> {
    return this.request("GET", `/manuscripts/${manuscriptId}/ethics-report`);
  }

  exportReference(
    manuscriptId: string,
    number: number,
    format: "bibtex" | "mla",
  ): Promise<{ format: string; text: string }> {
    return this.request(
      "GET",
      `/manuscripts/${manuscriptId}/references/${number}/export?format=${format}`,
    );
  }
}
