// End-to-end Generate-and-Check against the live backend: generate a
// conclusion with the stub provider, INSERT it (badge "unverified"), run the
// alignment check, confirm — the badge flips to "verified" and the ethics
// report empties.

import { describe, expect, it } from "vitest";

import { GenerationPanel } from "../src/panels/generation.js";
import { ReadPanel } from "../src/panels/read.js";
import { WritePanel } from "../src/panels/write.js";
import { bootApp, click, panel, pressEnter, q, qa, settle, type } from "./helpers.js";

describe("generate and check", () => {
  it("walks unverified generated text through the verification workflow", async () => {
    const app = await bootApp("generate_and_check");
    const write = panel<WritePanel>(app, "write-1");
    const generation = panel<GenerationPanel>(app, "generation-1");
    const read = panel<ReadPanel>(app, "read-1");

    // premise: type a claim and select it
    type(q(write.element, ".compose-input"), "Juveniles copy tutor syllables.");
    pressEnter(q(write.element, ".compose-input"));
    await settle(write);
    click(q(write.element, ".ms-span"));
    await settle(write);

    // the generation panel previews the premise it will consume
    expect(q(generation.element, ".premise-view").textContent).toContain(
      "Juveniles copy tutor syllables.",
    );

    // open the target document in Read (alignment target for the check)
    type(q(read.element, ".doc-input"), "d2");
    click(q(read.element, ".load-button"));
    await settle(read);

    // fire the generation function: stub conclusion echoes the premise
    click(q(generation.element, ".fire-button"));
    await settle(generation);
    const output = q(generation.element, ".generation-output").textContent ?? "";
    expect(output).toBe("Therefore, Juveniles copy tutor syllables.");

    // INSERT: the manuscript gains an unverified generated span
    click(q<HTMLButtonElement>(generation.element, ".insert-button"));
    await settle(generation);
    const unverified = q(write.element, ".prov-generated_unverified");
    expect(q(unverified, ".badge").textContent).toBe("unverified");

    await write.refreshEthics();
    expect(write.report?.clean).toBe(false);
    expect(write.report?.findings).toHaveLength(1);
    expect(q(write.element, ".ethics-dirty").textContent).toContain("1 unverified");

    // run the check: alignment of the generated claim against the document
    click(q(read.element, ".fire-button"));
    await settle(read);
    expect(app.lastAlignment.length).toBeGreaterThan(0);
    expect(qa(read.element, ".hit-item").length).toBeGreaterThan(0);
    // the generated text aligns to the tutor-syllable sentence
    expect(app.lastAlignment[0].text).toBe("Juveniles copy tutor syllables.");

    // confirm: badge flips to verified, ethics report empties
    click(q(write.element, ".confirm-button"));
    await settle(write);
    const verified = q(write.element, ".prov-generated_verified");
    expect(q(verified, ".badge").textContent).toBe("verified");
    expect(write.report?.clean).toBe(true);
    expect(write.report?.findings).toHaveLength(0);
    expect(qa(write.element, ".prov-generated_unverified")).toHaveLength(0);
  });

  it("global fire runs generation before discovery and read", async () => {
    const app = await bootApp("generate_and_check");
    const write = panel<WritePanel>(app, "write-1");
    const read = panel<ReadPanel>(app, "read-1");

    type(q(write.element, ".compose-input"), "Motifs repeat with stable timing.");
    pressEnter(q(write.element, ".compose-input"));
    await settle(write);
    click(q(write.element, ".ms-span"));
    await settle(write);

    type(q(read.element, ".doc-input"), "d2");
    click(q(read.element, ".load-button"));
    await settle(read);

    const trace = await app.fireAll();
    expect(trace.map((e) => e.module_id)).toEqual(["generation-1", "discovery-1", "read-1"]);
    expect(trace.every((e) => e.status === "ok")).toBe(true);
    const byModule = Object.fromEntries(trace.map((e) => [e.module_id, e]));
    expect(byModule["discovery-1"].input_digests.context).toBe(
      byModule["generation-1"].output_digest,
    );
  });

  it("keeps the previous output when the provider is unreachable", async () => {
    const app = await bootApp("generate_and_copy");
    const write = panel<WritePanel>(app, "write-1");
    const generation = panel<GenerationPanel>(app, "generation-1");

    type(q(write.element, ".compose-input"), "Premise for the stub.");
    pressEnter(q(write.element, ".compose-input"));
    await settle(write);
    click(q(write.element, ".ms-span"));
    await settle(write);

    click(q(generation.element, ".fire-button"));
    await settle(generation);
    const output = q(generation.element, ".generation-output").textContent;
    expect(output).toBe("Therefore, Premise for the stub.");

    // point the module at a dead provider and fire again
    const providerId = `dead-${Date.now()}`;
    await fetch(`${app.api.baseUrl}/providers`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        provider_id: providerId,
        capabilities: ["conclusion"],
        base_url: "http://127.0.0.1:1/generate",
        timeout_seconds: 0.5,
      }),
    });
    await app.updateModuleState("generation-1", { provider_id: providerId });
    click(q(generation.element, ".fire-button"));
    await settle(generation);

    // non-blocking toast, previous output retained
    expect(q(document.body, ".error-toast").textContent).toContain("ProviderUnreachable");
    expect(q(generation.element, ".generation-output").textContent).toBe(output);
  });
});
