// Generation module: function selector (citation / argument / assistant),
// citation intent, provider picker, premise preview, local Fire, the raw
// output (with the citation placeholder visible), INSERT into the
// manuscript, and assistant chat with a Clear button.

import { ModocApp } from "../app.js";
import { GenerationResultWire, ModuleWire } from "../types.js";
import { Panel } from "./base.js";

const FUNCTION_OF_API: Record<string, string> = {
  citation: "generate_citation",
  argument: "generate_conclusion",
  assistant: "assistant",
};

export class GenerationPanel extends Panel {
  private readonly apiSelect: HTMLSelectElement;
  private readonly intentSelect: HTMLSelectElement;
  private readonly providerSelect: HTMLSelectElement;
  private readonly premiseView: HTMLElement;
  private readonly promptInput: HTMLInputElement;
  private readonly output: HTMLElement;
  private readonly chatHost: HTMLElement;
  private readonly insertButton: HTMLButtonElement;

  constructor(
    private readonly app: ModocApp,
    moduleId: string,
  ) {
    super(moduleId);
    this.element.classList.add("generation-panel");

    const selectorRow = document.createElement("div");
    selectorRow.className = "row";
    this.apiSelect = document.createElement("select");
    this.apiSelect.className = "api-select";
    for (const [value, label] of [
      ["argument", "argument generation"],
      ["citation", "citation generation"],
      ["assistant", "AI assistant"],
    ]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = label;
      this.apiSelect.appendChild(option);
    }
    this.apiSelect.addEventListener("change", () => {
      void this.track(this.rebind(this.apiSelect.value).catch((e) => this.app.showError(e)));
    });

    this.intentSelect = document.createElement("select");
    this.intentSelect.className = "intent-select";
    for (const intent of ["Background", "Method", "Comparison"]) {
      const option = document.createElement("option");
      option.value = intent;
      option.textContent = intent;
      this.intentSelect.appendChild(option);
    }
    this.intentSelect.addEventListener("change", () => {
      void this.track(
        this.app
          .updateModuleState(this.moduleId, { intent: this.intentSelect.value })
          .catch((e) => this.app.showError(e)),
      );
    });

    this.providerSelect = document.createElement("select");
    this.providerSelect.className = "provider-select";
    this.providerSelect.addEventListener("change", () => {
      void this.track(
        this.app
          .updateModuleState(this.moduleId, { provider_id: this.providerSelect.value })
          .catch((e) => this.app.showError(e)),
      );
    });

    const fire = document.createElement("button");
    fire.className = "fire-button";
    fire.textContent = "Fire";
    fire.addEventListener("click", () => {
      void this.track(this.app.fireModule(this.moduleId).catch((e) => this.app.showError(e)));
    });
    selectorRow.append(this.apiSelect, this.intentSelect, this.providerSelect, fire);

    this.premiseView = document.createElement("p");
    this.premiseView.className = "premise-view";

    const promptRow = document.createElement("div");
    promptRow.className = "row prompt-row";
    this.promptInput = document.createElement("input");
    this.promptInput.className = "prompt-input";
    this.promptInput.placeholder = "ask the assistant";
    this.promptInput.addEventListener("change", () => {
      void this.track(
        this.app
          .updateModuleState(this.moduleId, { prompt: this.promptInput.value })
          .catch((e) => this.app.showError(e)),
      );
    });
    const clearButton = document.createElement("button");
    clearButton.className = "clear-button";
    clearButton.textContent = "Clear";
    clearButton.addEventListener("click", () => {
      void this.track(this.clearHistory().catch((e) => this.app.showError(e)));
    });
    promptRow.append(this.promptInput, clearButton);

    this.output = document.createElement("pre");
    this.output.className = "generation-output";

    this.insertButton = document.createElement("button");
    this.insertButton.className = "insert-button";
    this.insertButton.textContent = "INSERT";
    this.insertButton.disabled = true;
    this.insertButton.addEventListener("click", () => {
      void this.track(
        this.app
          .insertGenerated(this.moduleId)
          .then(() => this.app.writePanel()?.refreshEthics())
          .catch((e) => this.app.showError(e)),
      );
    });

    this.chatHost = document.createElement("div");
    this.chatHost.className = "chat-history";

    this.element.append(
      selectorRow,
      this.premiseView,
      promptRow,
      this.output,
      this.insertButton,
      this.chatHost,
    );
  }

  /** Swap the hosted function; incoming links are dropped by the unbind and
   * rewired for the new function where the graph allows it. */
  private async rebind(apiKind: string): Promise<void> {
    if (!this.app.workflow) return;
    const graphId = this.app.workflow.graph_id;
    await this.app.api.updateModule(graphId, this.moduleId, {
      unbind: true,
      bind_function: FUNCTION_OF_API[apiKind],
    });
    const write = this.app.workflow.modules.find((m) => m.kind === "write");
    const discovery = this.app.workflow.modules.find((m) => m.kind === "discovery");
    if (apiKind === "argument" && write) {
      await this.app.api.addLink(graphId, write.module_id, this.moduleId, "premise");
    } else if (apiKind === "citation" && write && discovery) {
      await this.app.api.addLink(graphId, write.module_id, this.moduleId, "context");
      await this.app.api.addLink(graphId, discovery.module_id, this.moduleId, "target_results");
    }
    await this.app.refreshWorkflow();
  }

  private async clearHistory(): Promise<void> {
    if (!this.app.workflow) return;
    await this.app.api.clearHistory(this.app.workflow.graph_id, this.moduleId);
    await this.app.refreshWorkflow();
  }

  async refreshProviders(): Promise<void> {
    const body = await this.app.api.providers();
    this.providerSelect.textContent = "";
    for (const provider of body.providers) {
      const option = document.createElement("option");
      option.value = provider.provider_id;
      option.textContent = provider.provider_id;
      this.providerSelect.appendChild(option);
    }
  }

  override render(module: ModuleWire): void {
    const fn = module.function;
    this.apiSelect.value =
      fn === "generate_citation" ? "citation" : fn === "assistant" ? "assistant" : "argument";
    this.intentSelect.style.display = fn === "generate_citation" ? "" : "none";
    this.promptInput.style.display = fn === "assistant" ? "" : "none";

    const premiseLink = this.app
      .linksInto(this.moduleId)
      .find((l) => l.slot === "premise" || l.slot === "context");
    if (premiseLink) {
      const source = this.app.module(premiseLink.from);
      const text = (source?.state.selection as string) ?? "";
      this.premiseView.textContent = text ? `premise: ${text}` : "premise: (select text in Write)";
      this.premiseView.style.display = "";
    } else {
      this.premiseView.style.display = "none";
    }

    const last = module.state.last_result as GenerationResultWire | null;
    this.output.textContent = last ? last.text : "";
    this.insertButton.disabled = !last;

    this.chatHost.textContent = "";
    const history = (module.state.history as { role: string; text: string }[]) ?? [];
    for (const turn of history) {
      const line = document.createElement("p");
      line.className = `chat-turn chat-${turn.role}`;
      line.textContent = `${turn.role}: ${turn.text}`;
      this.chatHost.appendChild(line);
    }
  }
}
