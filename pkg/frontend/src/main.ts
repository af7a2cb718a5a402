// Browser entry point. The service address comes from ?api= or defaults to
// the page origin; the starting workflow comes from ?preset=.

import { ApiClient } from "./api.js";
import { ModocApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? window.location.origin;
const presetName = params.get("preset") ?? "recall_and_cite";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const app = new ModocApp(new ApiClient(baseUrl), root);
void app.start(presetName).catch((error) => {
  app.showError(error);
  console.error(error);
});

declare global {
  interface Window {
    modocApp: ModocApp;
  }
}
window.modocApp = app;
