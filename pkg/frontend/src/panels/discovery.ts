// Discovery module: result cards with metadata and the four card actions
// (cite, add to library, download reference, expand abstract), a retrieval
// source selector, and a local Fire.

import { ModocApp } from "../app.js";
import { ModuleWire, SearchResultWire } from "../types.js";
import { Panel } from "./base.js";

export class DiscoveryPanel extends Panel {
  private readonly sourceSelect: HTMLSelectElement;
  private readonly cardHost: HTMLElement;
  lastExport: { doc_id: string; format: string; text: string } | null = null;

  constructor(
    private readonly app: ModocApp,
    moduleId: string,
  ) {
    super(moduleId);
    this.element.classList.add("discovery-panel");

    const controls = document.createElement("div");
    controls.className = "row";
    this.sourceSelect = document.createElement("select");
    this.sourceSelect.className = "source-select";
    for (const source of ["Database", "Manuscript"]) {
      const option = document.createElement("option");
      option.value = source.toLowerCase();
      option.textContent = source;
      this.sourceSelect.appendChild(option);
    }
    const fire = document.createElement("button");
    fire.className = "fire-button";
    fire.textContent = "Fire";
    fire.addEventListener("click", () => {
      void this.track(this.app.fireModule(this.moduleId).catch((e) => this.app.showError(e)));
    });
    controls.append(this.sourceSelect, fire);

    this.cardHost = document.createElement("div");
    this.cardHost.className = "result-cards";

    this.element.append(controls, this.cardHost);
  }

  override render(module: ModuleWire): void {
    const results = (module.state.results as SearchResultWire[]) ?? [];
    this.cardHost.textContent = "";
    for (const result of results) {
      this.cardHost.appendChild(this.card(result));
    }
  }

  private card(result: SearchResultWire): HTMLElement {
    const card = document.createElement("article");
    card.className = "doc-card";
    card.dataset.docId = result.doc_id;
    card.dataset.rank = String(result.rank);

    const title = document.createElement("h3");
    title.className = "card-title";
    title.textContent = `${result.rank}. ${result.metadata.title}`;
    const meta = document.createElement("p");
    meta.className = "card-meta";
    const authors = result.metadata.authors.map((a) => a.full_name).join(", ");
    meta.textContent = `${authors} — ${result.metadata.venue}, ${result.metadata.year ?? "n.d."}`;
    const score = document.createElement("span");
    score.className = "card-score";
    score.textContent = result.score.toFixed(4);

    const actions = document.createElement("div");
    actions.className = "card-actions";

    const citeButton = document.createElement("button");
    citeButton.className = "cite-button";
    citeButton.textContent = "Cite";
    citeButton.addEventListener("click", () => {
      void this.track(this.app.citeAtCursor(result.doc_id).catch((e) => this.app.showError(e)));
    });

    const libraryButton = document.createElement("button");
    libraryButton.className = "library-button";
    libraryButton.textContent = "Library";
    libraryButton.addEventListener("click", () => this.app.addToLibrary(result.doc_id));

    const formatSelect = document.createElement("select");
    formatSelect.className = "export-format";
    for (const fmt of ["bibtex", "mla"]) {
      const option = document.createElement("option");
      option.value = fmt;
      option.textContent = fmt === "bibtex" ? "BibTeX" : "MLA";
      formatSelect.appendChild(option);
    }
    const downloadButton = document.createElement("button");
    downloadButton.className = "download-button";
    downloadButton.textContent = "Reference";
    downloadButton.addEventListener("click", () => {
      void this.track(this.downloadReference(result.doc_id, formatSelect.value).catch((e) => this.app.showError(e)));
    });

    const abstractButton = document.createElement("button");
    abstractButton.className = "abstract-button";
    abstractButton.textContent = "Abstract";
    const abstractHost = document.createElement("p");
    abstractHost.className = "card-abstract";
    abstractHost.style.display = "none";
    abstractButton.addEventListener("click", () => {
      void this.track(this.toggleAbstract(result.doc_id, abstractHost).catch((e) => this.app.showError(e)));
    });

    actions.append(citeButton, libraryButton, formatSelect, downloadButton, abstractButton);
    card.append(title, meta, score, actions, abstractHost);
    return card;
  }

  private async downloadReference(docId: string, format: string): Promise<void> {
    const body = await fetch(
      `${this.app.api.baseUrl}/documents/${encodeURIComponent(docId)}/export?format=${format}`,
    ).then((r) => r.json());
    this.lastExport = { doc_id: docId, format, text: body.text };
    // object URLs are unavailable under jsdom; the payload is still recorded
    if (typeof URL.createObjectURL === "function") {
      const blob = new Blob([body.text], { type: "text/plain" });
      const anchor = document.createElement("a");
      anchor.href = URL.createObjectURL(blob);
      anchor.download = `${docId}.${format === "bibtex" ? "bib" : "txt"}`;
      anchor.click();
      URL.revokeObjectURL(anchor.href);
    }
  }

  private async toggleAbstract(docId: string, host: HTMLElement): Promise<void> {
    if (host.style.display !== "none") {
      host.style.display = "none";
      return;
    }
    if (!host.textContent) {
      const doc = await this.app.api.document(docId);
      host.textContent = doc.abstract;
    }
    host.style.display = "";
  }
}
