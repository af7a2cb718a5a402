// Write module: the manuscript editor. Spans render with provenance badges,
// clicking a span makes it the gold selection (mirrored into server-side
// module state so fires see exactly this text), references list at the end,
// and an ethics drawer listing unverified generated spans.

import { ModocApp } from "../app.js";
import { EthicsReportWire, ManuscriptWire, ModuleWire, SpanWire } from "../types.js";
import { Panel } from "./base.js";

const BADGE_LABEL: Record<string, string> = {
  generated_unverified: "unverified",
  generated_verified: "verified",
  extracted: "extracted",
};

export class WritePanel extends Panel {
  selectedIdx: number | null = null;
  report: EthicsReportWire | null = null;

  private readonly titleInput: HTMLInputElement;
  private readonly scopeSelect: HTMLSelectElement;
  private readonly spanHost: HTMLElement;
  private readonly textInput: HTMLInputElement;
  private readonly referenceHost: HTMLElement;
  private readonly drawer: HTMLElement;

  constructor(
    private readonly app: ModocApp,
    moduleId: string,
  ) {
    super(moduleId);
    this.element.classList.add("write-panel");

    const controls = document.createElement("div");
    controls.className = "row";
    this.titleInput = document.createElement("input");
    this.titleInput.className = "title-input";
    this.titleInput.addEventListener("change", () => {
      void this.track(this.saveTitle().catch((e) => this.app.showError(e)));
    });
    const saveButton = document.createElement("button");
    saveButton.className = "save-button";
    saveButton.textContent = "Save";
    saveButton.addEventListener("click", () => {
      void this.track(this.saveTitle().catch((e) => this.app.showError(e)));
    });
    this.scopeSelect = document.createElement("select");
    this.scopeSelect.className = "scope-select";
    for (const scope of ["selection", "manuscript"]) {
      const option = document.createElement("option");
      option.value = scope;
      option.textContent = scope === "selection" ? "Selection" : "Manuscript";
      this.scopeSelect.appendChild(option);
    }
    this.scopeSelect.addEventListener("change", () => {
      void this.track(
        this.app
          .updateModuleState(this.moduleId, { scope: this.scopeSelect.value })
          .catch((e) => this.app.showError(e)),
      );
    });
    const highlightButton = document.createElement("button");
    highlightButton.className = "highlight-button";
    highlightButton.textContent = "Highlight";
    highlightButton.addEventListener("click", () => {
      const selected = this.spanHost.querySelector(".selected");
      selected?.classList.toggle("gold");
    });
    controls.append(this.titleInput, saveButton, this.scopeSelect, highlightButton);

    this.spanHost = document.createElement("div");
    this.spanHost.className = "manuscript-text";

    const composeRow = document.createElement("div");
    composeRow.className = "row compose-row";
    this.textInput = document.createElement("input");
    this.textInput.className = "compose-input";
    this.textInput.placeholder = "type text, ENTER inserts at cursor";
    this.textInput.addEventListener("keydown", (event) => {
      if (event.key === "Enter") {
        void this.track(this.insertTyped().catch((e) => this.app.showError(e)));
      }
    });
    const insertButton = document.createElement("button");
    insertButton.className = "insert-text-button";
    insertButton.textContent = "Insert";
    insertButton.addEventListener("click", () => {
      void this.track(this.insertTyped().catch((e) => this.app.showError(e)));
    });
    composeRow.append(this.textInput, insertButton);

    const referenceHeading = document.createElement("h4");
    referenceHeading.textContent = "References";
    this.referenceHost = document.createElement("ol");
    this.referenceHost.className = "reference-list";

    const drawerHeading = document.createElement("h4");
    drawerHeading.className = "ethics-heading";
    drawerHeading.textContent = "Ethics report";
    drawerHeading.addEventListener("click", () => {
      void this.track(this.refreshEthics().catch((e) => this.app.showError(e)));
    });
    this.drawer = document.createElement("div");
    this.drawer.className = "ethics-drawer";

    this.element.append(
      controls,
      this.spanHost,
      composeRow,
      referenceHeading,
      this.referenceHost,
      drawerHeading,
      this.drawer,
    );
  }

  private get manuscript(): ManuscriptWire | null {
    return this.app.manuscript;
  }

  private async saveTitle(): Promise<void> {
    if (!this.manuscript) return;
    const ms = await this.app.api.updateManuscript(this.manuscript.manuscript_id, {
      title: this.titleInput.value,
    });
    this.app.setManuscript(ms);
  }

  private async insertTyped(): Promise<void> {
    const text = this.textInput.value;
    if (!text || !this.manuscript) return;
    const ms = await this.app.api.insertSpan(this.manuscript.manuscript_id, {
      position: this.app.cursorPosition(),
      provenance: "user_typed",
      text,
    });
    this.textInput.value = "";
    this.app.setManuscript(ms);
    await this.refreshEthics();
  }

  /** Select a span: gold highlight locally, selection text mirrored into the
   * module's server-side state so a later fire uses exactly this text. */
  private async selectSpan(idx: number, span: SpanWire): Promise<void> {
    this.selectedIdx = idx;
    this.spanHost.querySelectorAll(".selected").forEach((el) => el.classList.remove("selected"));
    this.spanHost.querySelector(`[data-idx="${idx}"]`)?.classList.add("selected", "gold");
    await this.app.updateModuleState(this.moduleId, { selection: span.text });
  }

  async refreshEthics(): Promise<void> {
    if (!this.manuscript) return;
    this.report = await this.app.api.ethicsReport(this.manuscript.manuscript_id);
    this.renderEthics();
  }

  private renderEthics(): void {
    this.drawer.textContent = "";
    if (!this.report) return;
    const status = document.createElement("p");
    status.className = this.report.clean ? "ethics-clean" : "ethics-dirty";
    status.textContent = this.report.clean
      ? "clean: no unverified generated text"
      : `${this.report.findings.length} unverified generated span(s)`;
    this.drawer.appendChild(status);
    for (const finding of this.report.findings) {
      const item = document.createElement("div");
      item.className = "ethics-finding";
      const link = document.createElement("a");
      link.className = "finding-link";
      link.textContent = `span ${finding.span_idx}: ${finding.excerpt}`;
      link.addEventListener("click", () => {
        const target = this.spanHost.querySelector(`[data-idx="${finding.span_idx}"]`);
        target?.classList.add("flash");
        setTimeout(() => target?.classList.remove("flash"), 600);
      });
      item.appendChild(link);
      this.drawer.appendChild(item);
    }
  }

  override render(module: ModuleWire): void {
    const ms = this.manuscript;
    if (!ms) return;
    if (document.activeElement !== this.titleInput) this.titleInput.value = ms.title;
    this.scopeSelect.value = (module.state.scope as string) ?? "selection";

    this.spanHost.textContent = "";
    ms.spans.forEach((span, idx) => {
      const el = document.createElement("span");
      el.className = `ms-span prov-${span.provenance.kind}`;
      el.dataset.idx = String(idx);
      el.textContent = span.text;
      if (span.citation_marker !== null) {
        el.classList.add("citation-marker");
      }
      const badge = BADGE_LABEL[span.provenance.kind];
      if (badge) {
        const badgeEl = document.createElement("sup");
        badgeEl.className = `badge badge-${badge}`;
        badgeEl.textContent = badge;
        el.appendChild(badgeEl);
        if (span.provenance.kind === "generated_unverified") {
          const confirm = document.createElement("button");
          confirm.className = "confirm-button";
          confirm.textContent = "confirm check";
          confirm.addEventListener("click", (event) => {
            event.stopPropagation();
            void this.track(
              this.app
                .verifySpan(idx)
                .then(() => this.refreshEthics())
                .catch((e) => this.app.showError(e)),
            );
          });
          el.appendChild(confirm);
        }
      }
      el.addEventListener("click", () => {
        void this.track(this.selectSpan(idx, span).catch((e) => this.app.showError(e)));
      });
      if (this.selectedIdx === idx) el.classList.add("selected", "gold");
      this.spanHost.appendChild(el);
    });

    this.referenceHost.textContent = "";
    for (const reference of ms.references) {
      const item = document.createElement("li");
      item.className = "reference-entry";
      item.dataset.number = String(reference.number);
      const authors = reference.metadata.authors.map((a) => a.full_name).join(", ");
      item.textContent = `[${reference.number}] ${authors}. ${reference.metadata.title}. ${reference.metadata.venue}, ${reference.metadata.year ?? "n.d."}`;
      this.referenceHost.appendChild(item);
    }
    this.renderEthics();
  }
}
