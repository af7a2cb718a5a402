// Keywords module: keyword tabs with per-tab NOT logic and field prefix, a
// year window, natural-text parsing, suggestion chips, and a local Fire that
// triggers the wired discovery.

import { ModocApp } from "../app.js";
import { KeyphraseWire, ModuleWire, QueryTermWire, QueryWire } from "../types.js";
import { Panel } from "./base.js";

const FIELDS = ["Any", "Title", "Abstract", "Venue", "Author.FullName"];
const YEAR_MIN = 1800;
const YEAR_MAX = 2100;

export class KeywordsPanel extends Panel {
  private terms: QueryTermWire[] = [];
  private yearRange: [number, number] | null = null;
  private suggestions: KeyphraseWire[] = [];

  private readonly input: HTMLInputElement;
  private readonly prefixSelect: HTMLSelectElement;
  private readonly notFlag: HTMLInputElement;
  private readonly tabHost: HTMLElement;
  private readonly yearToggle: HTMLInputElement;
  private readonly yearStart: HTMLInputElement;
  private readonly yearEnd: HTMLInputElement;
  private readonly naturalInput: HTMLInputElement;
  private readonly chipHost: HTMLElement;

  constructor(
    private readonly app: ModocApp,
    moduleId: string,
  ) {
    super(moduleId);
    this.element.classList.add("keywords-panel");

    const searchRow = document.createElement("div");
    searchRow.className = "row search-row";
    this.input = document.createElement("input");
    this.input.className = "keyword-input";
    this.input.placeholder = "enter keyword, ENTER adds a tab";
    this.input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") this.addTabFromInput();
    });
    this.prefixSelect = document.createElement("select");
    this.prefixSelect.className = "prefix-select";
    for (const field of FIELDS) {
      const option = document.createElement("option");
      option.value = field;
      option.textContent = field;
      this.prefixSelect.appendChild(option);
    }
    this.notFlag = document.createElement("input");
    this.notFlag.type = "checkbox";
    this.notFlag.className = "not-flag";
    const notLabel = document.createElement("label");
    notLabel.append(this.notFlag, document.createTextNode("NOT"));
    const fire = document.createElement("button");
    fire.className = "fire-button";
    fire.textContent = "Fire";
    fire.addEventListener("click", () => {
      void this.track(this.app.fireConsumerOf(this.moduleId, "query").catch((e) => this.app.showError(e)));
    });
    searchRow.append(this.input, this.prefixSelect, notLabel, fire);

    this.tabHost = document.createElement("div");
    this.tabHost.className = "keyword-tabs";

    const yearRow = document.createElement("div");
    yearRow.className = "row year-row";
    this.yearToggle = document.createElement("input");
    this.yearToggle.type = "checkbox";
    this.yearToggle.className = "year-toggle";
    this.yearStart = document.createElement("input");
    this.yearStart.type = "range";
    this.yearStart.min = String(YEAR_MIN);
    this.yearStart.max = String(YEAR_MAX);
    this.yearStart.value = "2000";
    this.yearStart.className = "year-start";
    this.yearEnd = document.createElement("input");
    this.yearEnd.type = "range";
    this.yearEnd.min = String(YEAR_MIN);
    this.yearEnd.max = String(YEAR_MAX);
    this.yearEnd.value = "2025";
    this.yearEnd.className = "year-end";
    const yearLabel = document.createElement("span");
    yearLabel.className = "year-label";
    const onYearChange = () => {
      const start = Math.min(parseInt(this.yearStart.value, 10), parseInt(this.yearEnd.value, 10));
      const end = Math.max(parseInt(this.yearStart.value, 10), parseInt(this.yearEnd.value, 10));
      this.yearRange = this.yearToggle.checked ? [start, end] : null;
      yearLabel.textContent = this.yearRange ? `${start}..${end}` : "any year";
      void this.sync();
    };
    this.yearToggle.addEventListener("change", onYearChange);
    this.yearStart.addEventListener("change", onYearChange);
    this.yearEnd.addEventListener("change", onYearChange);
    yearLabel.textContent = "any year";
    yearRow.append(this.yearToggle, this.yearStart, this.yearEnd, yearLabel);

    const naturalRow = document.createElement("div");
    naturalRow.className = "row natural-row";
    this.naturalInput = document.createElement("input");
    this.naturalInput.className = "natural-input";
    this.naturalInput.placeholder = "search in your own words";
    const parse = document.createElement("button");
    parse.className = "parse-button";
    parse.textContent = "Parse";
    parse.addEventListener("click", () => {
      void this.track(this.parseNatural().catch((e) => this.app.showError(e)));
    });
    naturalRow.append(this.naturalInput, parse);

    this.chipHost = document.createElement("div");
    this.chipHost.className = "suggestion-chips";

    this.element.append(searchRow, this.tabHost, yearRow, naturalRow, this.chipHost);
  }

  private addTabFromInput(): void {
    const text = this.input.value.trim();
    if (!text) return;
    this.terms.push({
      field: this.prefixSelect.value,
      text,
      negated: this.notFlag.checked,
    });
    this.input.value = "";
    this.notFlag.checked = false;
    this.renderTabs();
    void this.sync();
  }

  private async parseNatural(): Promise<void> {
    const text = this.naturalInput.value.trim();
    if (!text) return;
    const parsed = await this.app.api.parseQuery(text);
    this.terms = parsed.query.terms;
    this.yearRange = parsed.query.year_range;
    this.renderTabs();
    await this.sync();
  }

  /** Push the composed query into the module's server-side state. */
  private sync(): Promise<unknown> {
    const query: QueryWire | null = this.terms.length
      ? { terms: this.terms, year_range: this.yearRange, context_text: null, limit: 20 }
      : null;
    return this.track(
      this.app
        .updateModuleState(this.moduleId, { query, free_text: this.naturalInput.value })
        .catch((e) => this.app.showError(e)),
    );
  }

  private renderTabs(): void {
    this.tabHost.textContent = "";
    this.terms.forEach((term, idx) => {
      const tab = document.createElement("span");
      tab.className = "keyword-tab" + (term.negated ? " negated" : "");
      const label = document.createElement("span");
      label.className = "tab-text";
      label.textContent =
        (term.negated ? "NOT:" : "") + (term.field !== "Any" ? `${term.field}:` : "") + term.text;
      const remove = document.createElement("button");
      remove.className = "tab-remove";
      remove.textContent = "×";
      remove.addEventListener("click", () => {
        this.terms.splice(idx, 1);
        this.renderTabs();
        void this.sync();
      });
      tab.append(label, remove);
      this.tabHost.appendChild(tab);
    });
  }

  setSuggestions(phrases: KeyphraseWire[]): void {
    this.suggestions = phrases;
    this.chipHost.textContent = "";
    for (const phrase of this.suggestions) {
      const chip = document.createElement("button");
      chip.className = "suggestion-chip";
      chip.textContent = phrase.phrase;
      chip.addEventListener("click", () => {
        this.terms.push({ field: "Any", text: phrase.phrase, negated: false });
        this.renderTabs();
        void this.sync();
      });
      this.chipHost.appendChild(chip);
    }
  }

  override render(module: ModuleWire): void {
    const query = module.state.query as QueryWire | null;
    if (query) {
      this.terms = query.terms;
      this.yearRange = query.year_range;
    } else {
      this.terms = [];
      this.yearRange = null;
    }
    this.renderTabs();
  }
}
