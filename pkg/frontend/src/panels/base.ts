import { ModuleWire } from "../types.js";

// Panels render server state into their window body and funnel every async
// handler through track() so tests (and the busy indicator) can await the
// in-flight action.

export abstract class Panel {
  readonly element: HTMLElement;
  pending: Promise<unknown> = Promise.resolve();

  constructor(readonly moduleId: string) {
    this.element = document.createElement("div");
    this.element.className = "panel";
    this.element.dataset.moduleId = moduleId;
  }

  protected track<T>(action: Promise<T>): Promise<T> {
    this.element.classList.add("busy");
    const settled = action.finally(() => this.element.classList.remove("busy"));
    this.pending = settled.catch(() => undefined);
    return settled;
  }

  abstract render(module: ModuleWire): void;
}
