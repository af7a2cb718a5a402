import { ApiClient } from "../src/api.js";
import { ModocApp } from "../src/app.js";
import { Panel } from "../src/panels/base.js";
import { BASE_URL } from "./fixture.js";

export async function bootApp(preset: string, title = "Test draft"): Promise<ModocApp> {
  document.body.innerHTML = "";
  localStorage.clear();
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = new ModocApp(new ApiClient(BASE_URL), root);
  await app.start(preset, title);
  return app;
}

export function panel<T extends Panel>(app: ModocApp, moduleId: string): T {
  const found = app.panels.get(moduleId);
  if (!found) throw new Error(`no panel for ${moduleId}`);
  return found as T;
}

export function q<T extends HTMLElement>(scope: ParentNode, selector: string): T {
  const el = scope.querySelector(selector);
  if (!el) throw new Error(`selector ${selector} matched nothing`);
  return el as T;
}

export function qa<T extends HTMLElement>(scope: ParentNode, selector: string): T[] {
  return [...scope.querySelectorAll(selector)] as T[];
}

export function click(el: HTMLElement): void {
  el.click();
}

export function type(input: HTMLInputElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

export function pressEnter(input: HTMLInputElement): void {
  input.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter", bubbles: true }));
}

export function change(el: HTMLInputElement | HTMLSelectElement, value: string): void {
  el.value = value;
  el.dispatchEvent(new Event("change", { bubbles: true }));
}

export async function settle(...panels: Panel[]): Promise<void> {
  for (const p of panels) await p.pending;
}
