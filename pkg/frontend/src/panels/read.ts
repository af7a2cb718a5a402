// Read module: document viewer with display scope, retrieval mode (none /
// align against another window / highlights), alignment granularity,
// PREVIOUS/NEXT hit navigation, a list view, and score-brightness shading.

import { ModocApp } from "../app.js";
import { AlignmentHitWire, DocumentWire, ModuleWire } from "../types.js";
import { Panel } from "./base.js";

function addressKey(hit: AlignmentHitWire): string {
  const a = hit.address;
  return [a.granularity, a.section_idx, a.paragraph_idx, a.sentence_idx].join("/");
}

export class ReadPanel extends Panel {
  private doc: DocumentWire | null = null;
  private hits: AlignmentHitWire[] = [];
  private currentHit = 0;

  private readonly docInput: HTMLInputElement;
  private readonly displaySelect: HTMLSelectElement;
  private readonly retrievalSelect: HTMLSelectElement;
  private readonly granularitySelect: HTMLSelectElement;
  private readonly banner: HTMLElement;
  private readonly bodyHost: HTMLElement;
  private readonly listHost: HTMLElement;
  private readonly positionLabel: HTMLElement;

  constructor(
    private readonly app: ModocApp,
    moduleId: string,
  ) {
    super(moduleId);
    this.element.classList.add("read-panel");

    const loadRow = document.createElement("div");
    loadRow.className = "row";
    this.docInput = document.createElement("input");
    this.docInput.className = "doc-input";
    this.docInput.placeholder = "document id";
    const loadButton = document.createElement("button");
    loadButton.className = "load-button";
    loadButton.textContent = "Open";
    loadButton.addEventListener("click", () => {
      void this.track(this.loadDocument(this.docInput.value.trim()).catch((e) => this.app.showError(e)));
    });
    const citeButton = document.createElement("button");
    citeButton.className = "cite-button";
    citeButton.textContent = "Cite";
    citeButton.addEventListener("click", () => {
      if (this.doc) {
        void this.track(this.app.citeAtCursor(this.doc.id).catch((e) => this.app.showError(e)));
      }
    });
    loadRow.append(this.docInput, loadButton, citeButton);

    const menuRow = document.createElement("div");
    menuRow.className = "row";
    this.displaySelect = document.createElement("select");
    this.displaySelect.className = "display-select";
    this.displaySelect.addEventListener("change", () => {
      void this.track(
        this.app
          .updateModuleState(this.moduleId, { display_scope: this.displaySelect.value })
          .then(() => this.renderBody())
          .catch((e) => this.app.showError(e)),
      );
    });
    this.retrievalSelect = document.createElement("select");
    this.retrievalSelect.className = "retrieval-select";
    this.retrievalSelect.addEventListener("change", () => {
      void this.track(this.configureRetrieval(this.retrievalSelect.value).catch((e) => this.app.showError(e)));
    });
    this.granularitySelect = document.createElement("select");
    this.granularitySelect.className = "granularity-select";
    for (const granularity of ["sentence", "paragraph", "section"]) {
      const option = document.createElement("option");
      option.value = granularity;
      option.textContent = granularity;
      this.granularitySelect.appendChild(option);
    }
    this.granularitySelect.addEventListener("change", () => {
      void this.track(
        this.app
          .updateModuleState(this.moduleId, { granularity: this.granularitySelect.value })
          .catch((e) => this.app.showError(e)),
      );
    });
    const fire = document.createElement("button");
    fire.className = "fire-button";
    fire.textContent = "Fire";
    fire.addEventListener("click", () => {
      void this.track(this.app.fireModule(this.moduleId).catch((e) => this.app.showError(e)));
    });
    menuRow.append(this.displaySelect, this.retrievalSelect, this.granularitySelect, fire);

    const navRow = document.createElement("div");
    navRow.className = "row nav-row";
    const previous = document.createElement("button");
    previous.className = "prev-button";
    previous.textContent = "PREVIOUS";
    previous.addEventListener("click", () => this.step(-1));
    const next = document.createElement("button");
    next.className = "next-button";
    next.textContent = "NEXT";
    next.addEventListener("click", () => this.step(1));
    this.positionLabel = document.createElement("span");
    this.positionLabel.className = "hit-position";
    navRow.append(previous, next, this.positionLabel);

    this.banner = document.createElement("div");
    this.banner.className = "alignment-banner";

    this.bodyHost = document.createElement("div");
    this.bodyHost.className = "document-body";

    this.listHost = document.createElement("ol");
    this.listHost.className = "hit-list";

    this.element.append(loadRow, menuRow, this.banner, navRow, this.bodyHost, this.listHost);
    this.refreshRetrievalOptions();
  }

  async loadDocument(docId: string): Promise<void> {
    if (!docId) return;
    this.doc = await this.app.api.document(docId);
    await this.app.updateModuleState(this.moduleId, { doc_id: docId });
    this.renderDisplayOptions();
    this.renderBody();
  }

  /** Retrieval menu: none (this window is an alignment source), highlights,
   * or align:<sourceModuleId>. Rewires the graph accordingly. */
  private async configureRetrieval(choice: string): Promise<void> {
    if (!this.app.workflow) return;
    const graphId = this.app.workflow.graph_id;
    if (choice === "none") {
      await this.app.api.updateModule(graphId, this.moduleId, { unbind: true });
    } else if (choice === "highlights") {
      await this.app.api.updateModule(graphId, this.moduleId, {
        unbind: true,
        bind_function: "highlights",
      });
    } else if (choice.startsWith("align:")) {
      const source = choice.slice("align:".length);
      await this.app.api.updateModule(graphId, this.moduleId, {
        unbind: true,
        bind_function: "align",
      });
      await this.app.api.addLink(graphId, source, this.moduleId, "alignment_source");
    }
    await this.app.refreshWorkflow();
  }

  refreshRetrievalOptions(): void {
    const current = this.retrievalSelect.value || "none";
    this.retrievalSelect.textContent = "";
    const options: [string, string][] = [
      ["none", "none"],
      ["highlights", "Highlights"],
    ];
    for (const module of this.app.workflow?.modules ?? []) {
      if (module.module_id === this.moduleId) continue;
      if (["write", "read", "generation"].includes(module.kind)) {
        options.push([`align:${module.module_id}`, `Align ${module.module_id}`]);
      }
    }
    for (const [value, label] of options) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = label;
      this.retrievalSelect.appendChild(option);
    }
    this.retrievalSelect.value = options.some(([v]) => v === current) ? current : "none";
  }

  private renderDisplayOptions(): void {
    this.displaySelect.textContent = "";
    const whole = document.createElement("option");
    whole.value = "document";
    whole.textContent = "entire document";
    this.displaySelect.appendChild(whole);
    this.doc?.sections.forEach((section, idx) => {
      const option = document.createElement("option");
      option.value = `section:${idx}`;
      option.textContent = section.title || `section ${idx + 1}`;
      this.displaySelect.appendChild(option);
    });
  }

  private renderBody(): void {
    this.bodyHost.textContent = "";
    if (!this.doc) return;
    const scope = this.displaySelect.value || "document";
    const only = scope.startsWith("section:") ? parseInt(scope.split(":")[1], 10) : null;

    const shade = this.shadeMap();
    this.doc.sections.forEach((section, sectionIdx) => {
      if (only !== null && sectionIdx !== only) return;
      const sectionElement = document.createElement("section");
      const heading = document.createElement("h4");
      heading.textContent = section.title;
      sectionElement.appendChild(heading);
      section.paragraphs.forEach((paragraph, paragraphIdx) => {
        const paragraphElement = document.createElement("p");
        paragraph.forEach((sentence, sentenceIdx) => {
          const span = document.createElement("span");
          span.className = "unit";
          span.dataset.addr = `sentence/${sectionIdx}/${paragraphIdx}/${sentenceIdx}`;
          span.textContent = sentence + " ";
          span.addEventListener("click", () => {
            void this.track(
              this.app
                .updateModuleState(this.moduleId, { selection: sentence })
                .catch((e) => this.app.showError(e)),
            );
            this.bodyHost
              .querySelectorAll(".selected")
              .forEach((el) => el.classList.remove("selected"));
            span.classList.add("selected");
          });
          const brightness = shade.get(`sentence/${sectionIdx}/${paragraphIdx}/${sentenceIdx}`);
          if (brightness !== undefined) {
            span.classList.add("aligned");
            span.style.backgroundColor = `rgba(255, 200, 40, ${brightness.toFixed(3)})`;
          }
          paragraphElement.appendChild(span);
        });
        sectionElement.appendChild(paragraphElement);
      });
      this.bodyHost.appendChild(sectionElement);
    });
  }

  /** Linear score → background alpha mapping over the current hit range. */
  private shadeMap(): Map<string, number> {
    const shade = new Map<string, number>();
    if (!this.hits.length) return shade;
    const scores = this.hits.map((h) => h.score);
    const min = Math.min(...scores);
    const max = Math.max(...scores);
    for (const hit of this.hits) {
      const normalized = max === min ? 1 : (hit.score - min) / (max - min);
      shade.set(addressKey(hit), 0.15 + 0.6 * normalized);
    }
    return shade;
  }

  private step(direction: number): void {
    if (!this.hits.length) return;
    this.currentHit = (this.currentHit + direction + this.hits.length) % this.hits.length;
    this.positionLabel.textContent = `hit ${this.currentHit + 1}/${this.hits.length}`;
    const key = addressKey(this.hits[this.currentHit]);
    this.bodyHost.querySelectorAll(".current-hit").forEach((el) => el.classList.remove("current-hit"));
    const target = this.bodyHost.querySelector(`[data-addr="${key}"]`);
    if (target) {
      target.classList.add("current-hit");
      if (typeof (target as HTMLElement).scrollIntoView === "function") {
        (target as HTMLElement).scrollIntoView();
      }
    }
  }

  override render(module: ModuleWire): void {
    const docId = module.state.doc_id as string | null;
    if (docId && this.docInput.value !== docId) this.docInput.value = docId;
    this.granularitySelect.value = (module.state.granularity as string) ?? "sentence";
    this.hits = (module.state.hits as AlignmentHitWire[]) ?? [];
    this.currentHit = 0;
    this.positionLabel.textContent = this.hits.length ? `hit 1/${this.hits.length}` : "";
    this.refreshRetrievalOptions();

    // banner: text currently provided by the alignment source, if wired
    const sourceLink = this.app.linksInto(this.moduleId).find((l) => l.slot === "alignment_source");
    if (sourceLink) {
      const source = this.app.module(sourceLink.from);
      const text =
        (source?.state.selection as string) ??
        ((source?.state.last_result as { text?: string } | null)?.text ?? "");
      this.banner.textContent = text ? `aligning: ${text}` : "alignment source is empty";
      this.banner.style.display = "";
    } else {
      this.banner.style.display = "none";
    }

    this.listHost.textContent = "";
    for (const hit of this.hits) {
      const item = document.createElement("li");
      item.className = "hit-item";
      item.dataset.rank = String(hit.rank);
      item.textContent = `[${hit.score.toFixed(4)}] ${hit.text}`;
      this.listHost.appendChild(item);
    }
    this.renderBody();
  }
}
