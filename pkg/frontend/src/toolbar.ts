// Toolbar: back button, editable manuscript title, one button per module
// (opens or refocuses its window), the library drawer, and the global Fire
// that runs every bound function in dependency order.

import { ModocApp } from "./app.js";

export class Toolbar {
  readonly element: HTMLElement;
  private readonly titleInput: HTMLInputElement;
  private readonly moduleHost: HTMLElement;
  private readonly libraryHost: HTMLElement;

  constructor(private readonly app: ModocApp) {
    this.element = document.createElement("header");
    this.element.className = "toolbar";

    const back = document.createElement("button");
    back.className = "back-button";
    back.textContent = "← Back";
    back.addEventListener("click", () => {
      this.element.dispatchEvent(new CustomEvent("modoc:back", { bubbles: true }));
    });

    this.titleInput = document.createElement("input");
    this.titleInput.className = "toolbar-title";
    this.titleInput.addEventListener("change", () => {
      const ms = this.app.manuscript;
      if (!ms) return;
      void this.app.api
        .updateManuscript(ms.manuscript_id, { title: this.titleInput.value })
        .then((updated) => this.app.setManuscript(updated))
        .catch((e) => this.app.showError(e));
    });

    const classic = document.createElement("button");
    classic.className = "classic-toggle";
    classic.textContent = "classic interface";
    classic.disabled = true;
    classic.title = "the legacy interface is not part of this build";

    this.moduleHost = document.createElement("span");
    this.moduleHost.className = "module-buttons";

    const fire = document.createElement("button");
    fire.className = "global-fire";
    fire.textContent = "Fire all";
    fire.addEventListener("click", () => {
      fire.disabled = true;
      void this.app
        .fireAll()
        .catch((e) => this.app.showError(e))
        .finally(() => {
          fire.disabled = false;
        });
    });

    this.libraryHost = document.createElement("span");
    this.libraryHost.className = "library-drawer";

    this.element.append(back, this.titleInput, classic, this.moduleHost, fire, this.libraryHost);
  }

  render(): void {
    if (document.activeElement !== this.titleInput) {
      this.titleInput.value = this.app.manuscript?.title ?? "";
    }
    this.moduleHost.textContent = "";
    for (const module of this.app.workflow?.modules ?? []) {
      const button = document.createElement("button");
      button.className = `module-button module-button-${module.kind}`;
      button.textContent = module.module_id;
      button.addEventListener("click", () => {
        this.app.ensurePanel(module);
        this.app.workspace.window(module.module_id)?.show();
      });
      this.moduleHost.appendChild(button);
    }
    this.libraryHost.textContent = this.app.library.length
      ? `library: ${this.app.library.join(", ")}`
      : "";
  }
}
