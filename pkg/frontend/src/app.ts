// Application shell: owns the workflow graph snapshot, the manuscript
// snapshot, the workspace windows, and one panel per module. Panels call
// back into the app for anything that crosses module boundaries (citing at
// the cursor, firing a linked module, verification evidence).

import { ApiClient } from "./api.js";
import {
  AlignmentHitWire,
  ApiError,
  ManuscriptWire,
  ModuleWire,
  SearchResultWire,
  TraceEntryWire,
  WorkflowWire,
} from "./types.js";
import { Workspace } from "./workspace.js";
import { Toolbar } from "./toolbar.js";
import { Panel } from "./panels/base.js";
import { KeywordsPanel } from "./panels/keywords.js";
import { DiscoveryPanel } from "./panels/discovery.js";
import { ReadPanel } from "./panels/read.js";
import { WritePanel } from "./panels/write.js";
import { GenerationPanel } from "./panels/generation.js";

const PANEL_TITLES: Record<string, string> = {
  keywords: "Keywords",
  discovery: "Discovery",
  read: "Read",
  write: "Write",
  generation: "Generation",
};

export class ModocApp {
  readonly element: HTMLElement;
  readonly workspace: Workspace;
  readonly toolbar: Toolbar;
  readonly panels = new Map<string, Panel>();

  workflow: WorkflowWire | null = null;
  manuscript: ManuscriptWire | null = null;
  library: string[] = [];
  lastTrace: TraceEntryWire[] = [];
  lastAlignment: AlignmentHitWire[] = [];
  lastDiscovery: SearchResultWire[] = [];

  constructor(
    readonly api: ApiClient,
    root: HTMLElement,
  ) {
    this.element = root;
    this.toolbar = new Toolbar(this);
    this.workspace = new Workspace();
    root.append(this.toolbar.element, this.workspace.element);
  }

  // -- boot -----------------------------------------------------------------

  async start(presetName: string, manuscriptTitle = "Untitled"): Promise<void> {
    this.manuscript = await this.api.createManuscript(manuscriptTitle);
    this.workflow = await this.api.createWorkflow(presetName);
    await this.api.updateManuscript(this.manuscript.manuscript_id, {
      workflow_graph_ref: this.workflow.graph_id,
    });
    const write = this.workflow.modules.find((m) => m.kind === "write");
    if (write) {
      this.workflow = await this.api.updateModule(this.workflow.graph_id, write.module_id, {
        state: { manuscript_id: this.manuscript.manuscript_id },
      });
    }
    this.toolbar.render();
    this.openModuleWindows();
    for (const panel of this.panels.values()) {
      if (panel instanceof GenerationPanel) await panel.refreshProviders();
    }
    this.renderAll();
  }

  openModuleWindows(): void {
    if (!this.workflow) return;
    for (const module of this.workflow.modules) {
      this.ensurePanel(module);
    }
  }

  ensurePanel(module: ModuleWire): Panel {
    let panel = this.panels.get(module.module_id);
    if (!panel) {
      panel = this.createPanel(module);
      this.panels.set(module.module_id, panel);
      const win = this.workspace.openWindow(
        module.module_id,
        module.kind,
        `${PANEL_TITLES[module.kind] ?? module.kind} (${module.module_id})`,
      );
      win.body.appendChild(panel.element);
    }
    return panel;
  }

  private createPanel(module: ModuleWire): Panel {
    switch (module.kind) {
      case "keywords":
        return new KeywordsPanel(this, module.module_id);
      case "discovery":
        return new DiscoveryPanel(this, module.module_id);
      case "read":
        return new ReadPanel(this, module.module_id);
      case "write":
        return new WritePanel(this, module.module_id);
      case "generation":
        return new GenerationPanel(this, module.module_id);
      default:
        throw new Error(`unknown module kind ${module.kind}`);
    }
  }

  // -- shared state ------------------------------------------------------------

  module(moduleId: string): ModuleWire | undefined {
    return this.workflow?.modules.find((m) => m.module_id === moduleId);
  }

  linksInto(moduleId: string) {
    return this.workflow?.links.filter((l) => l.to === moduleId) ?? [];
  }

  linksFrom(moduleId: string) {
    return this.workflow?.links.filter((l) => l.from === moduleId) ?? [];
  }

  renderAll(): void {
    if (!this.workflow) return;
    for (const module of this.workflow.modules) {
      const panel = this.panels.get(module.module_id);
      panel?.render(module);
      const win = this.workspace.window(module.module_id);
      win?.setBadges(this.linksInto(module.module_id).map((l) => `${l.slot}←${l.from}`));
    }
    this.toolbar.render();
  }

  setWorkflow(workflow: WorkflowWire): void {
    this.workflow = workflow;
    this.renderAll();
  }

  async refreshWorkflow(): Promise<void> {
    if (!this.workflow) return;
    this.setWorkflow(await this.api.workflow(this.workflow.graph_id));
  }

  setManuscript(ms: ManuscriptWire): void {
    this.manuscript = ms;
    for (const panel of this.panels.values()) {
      if (panel instanceof WritePanel) {
        const module = this.module(panel.moduleId);
        if (module) panel.render(module);
      }
    }
    this.toolbar.render();
  }

  // -- cross-panel actions -------------------------------------------------------

  async updateModuleState(moduleId: string, state: Record<string, unknown>): Promise<void> {
    if (!this.workflow) return;
    this.setWorkflow(await this.api.updateModule(this.workflow.graph_id, moduleId, { state }));
  }

  async fireModule(moduleId: string): Promise<TraceEntryWire> {
    if (!this.workflow) throw new Error("no workflow");
    const fired = await this.api.fireModule(this.workflow.graph_id, moduleId);
    await this.refreshWorkflow();
    const module = this.module(moduleId);
    if (module?.kind === "discovery") {
      this.lastDiscovery = (module.state.results as SearchResultWire[]) ?? [];
      await this.refreshSuggestions(moduleId);
    }
    if (module?.kind === "read" && module.function === "align") {
      this.lastAlignment = (module.state.hits as AlignmentHitWire[]) ?? [];
    }
    this.workspace.window(moduleId)?.flash();
    return fired.entry;
  }

  async fireAll(): Promise<TraceEntryWire[]> {
    if (!this.workflow) throw new Error("no workflow");
    const fired = await this.api.fireAll(this.workflow.graph_id);
    this.lastTrace = fired.trace;
    this.setWorkflow(fired.workflow);
    for (const module of fired.workflow.modules) {
      if (module.kind === "discovery") {
        this.lastDiscovery = (module.state.results as SearchResultWire[]) ?? [];
      }
      if (module.kind === "read" && module.function === "align") {
        this.lastAlignment = (module.state.hits as AlignmentHitWire[]) ?? [];
      }
    }
    for (const entry of fired.trace) {
      this.workspace.window(entry.module_id)?.flash();
    }
    return fired.trace;
  }

  /** Fire the module that consumes this module's output (local Fire on a
   * source panel, e.g. Keywords firing the wired Discovery). */
  async fireConsumerOf(moduleId: string, slot?: string): Promise<TraceEntryWire | null> {
    const outgoing = this.linksFrom(moduleId).filter((l) => !slot || l.slot === slot);
    if (!outgoing.length) return null;
    return this.fireModule(outgoing[0].to);
  }

  private async refreshSuggestions(discoveryId: string): Promise<void> {
    if (!this.lastDiscovery.length) return;
    const queryLink = this.linksInto(discoveryId).find((l) => l.slot === "query");
    if (!queryLink) return;
    const keywords = this.module(queryLink.from);
    const panel = this.panels.get(queryLink.from);
    if (!keywords || !(panel instanceof KeywordsPanel)) return;
    try {
      const body = await this.api.keyphrases(
        this.lastDiscovery.map((r) => r.doc_id),
        (keywords.state.query as never) ?? undefined,
      );
      panel.setSuggestions(body.keyphrases);
    } catch (error) {
      if (error instanceof ApiError && error.code === "NoCandidates") {
        panel.setSuggestions([]);
        return;
      }
      this.showError(error);
    }
  }

  /** Span-list position right after the currently selected span. */
  cursorPosition(): number {
    const write = this.writePanel();
    if (!write || !this.manuscript) return this.manuscript?.spans.length ?? 0;
    return write.selectedIdx === null ? this.manuscript.spans.length : write.selectedIdx + 1;
  }

  writePanel(): WritePanel | null {
    for (const panel of this.panels.values()) {
      if (panel instanceof WritePanel) return panel;
    }
    return null;
  }

  async citeAtCursor(docId: string): Promise<void> {
    if (!this.manuscript) throw new Error("no manuscript open");
    const ms = await this.api.cite(this.manuscript.manuscript_id, this.cursorPosition(), docId);
    this.setManuscript(ms);
  }

  async insertGenerated(moduleId: string): Promise<void> {
    if (!this.manuscript) throw new Error("no manuscript open");
    const module = this.module(moduleId);
    const last = module?.state.last_result as { request_digest: string; kind: string } | null;
    if (!last) throw new Error("nothing generated yet");
    const targetDoc =
      (module?.state.target_doc_id as string | null) ??
      (last.kind === "citation" ? this.lastDiscovery[0]?.doc_id : undefined);
    const ms = await this.api.insertSpan(this.manuscript.manuscript_id, {
      position: this.cursorPosition(),
      provenance: "generated",
      request_digest: last.request_digest,
      target_doc_id: targetDoc ?? undefined,
    });
    this.setManuscript(ms);
  }

  /** Confirm a span against the freshest retrieval evidence. */
  async verifySpan(spanIdx: number): Promise<void> {
    if (!this.manuscript) throw new Error("no manuscript open");
    let method: string;
    let evidence: [unknown, number][];
    if (this.lastAlignment.length) {
      method = "alignment";
      evidence = [[this.lastAlignment[0].address, this.lastAlignment[0].score]];
    } else if (this.lastDiscovery.length) {
      method = "discovery";
      evidence = [[this.lastDiscovery[0].doc_id, this.lastDiscovery[0].score]];
    } else {
      throw new Error("run an alignment or discovery check before confirming");
    }
    const ms = await this.api.verifySpan(this.manuscript.manuscript_id, spanIdx, {
      method,
      evidence,
      user_confirmed: true,
    });
    this.setManuscript(ms);
  }

  addToLibrary(docId: string): void {
    if (!this.library.includes(docId)) this.library.push(docId);
    this.toolbar.render();
  }

  showError(error: unknown): void {
    const toast = document.createElement("div");
    toast.className = "toast error-toast";
    toast.textContent =
      error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
    this.element.appendChild(toast);
    setTimeout(() => toast.remove(), 4000);
  }
}
