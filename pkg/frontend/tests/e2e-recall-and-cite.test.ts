// End-to-end Recall-and-Cite against the live backend: type keywords,
// select a claim in Write, fire Discovery, cite the top card. The
// manuscript must gain the "[1]" marker and one reference entry, and the
// ethics report must stay clean throughout.

import { describe, expect, it } from "vitest";

import { DiscoveryPanel } from "../src/panels/discovery.js";
import { KeywordsPanel } from "../src/panels/keywords.js";
import { WritePanel } from "../src/panels/write.js";
import { bootApp, click, panel, pressEnter, q, qa, settle, type } from "./helpers.js";

describe("recall and cite", () => {
  it("cites the top discovery card into the manuscript", async () => {
    const app = await bootApp("recall_and_cite");
    const write = panel<WritePanel>(app, "write-1");
    const keywords = panel<KeywordsPanel>(app, "keywords-1");
    const discovery = panel<DiscoveryPanel>(app, "discovery-1");

    // type the claim into Write and select it (gold highlight + server state)
    type(q(write.element, ".compose-input"), "Zebra finch song learning follows motifs.");
    pressEnter(q(write.element, ".compose-input"));
    await settle(write);
    const claimSpan = q<HTMLElement>(write.element, ".ms-span");
    click(claimSpan);
    await settle(write);
    expect(claimSpan.classList.contains("gold")).toBe(true);
    const writeModule = app.module("write-1");
    expect(writeModule?.state.selection).toBe("Zebra finch song learning follows motifs.");

    // keywords: one tab, then the local Fire triggers the wired discovery
    type(q(keywords.element, ".keyword-input"), "learning");
    pressEnter(q(keywords.element, ".keyword-input"));
    await settle(keywords);
    expect(qa(keywords.element, ".keyword-tab")).toHaveLength(1);

    click(q(keywords.element, ".fire-button"));
    await settle(keywords);

    const cards = qa(discovery.element, ".doc-card");
    expect(cards.length).toBeGreaterThan(0);
    // semantic context ranks the zebra finch paper first
    expect(cards[0].dataset.docId).toBe("d2");

    // suggestion chips appeared from the keyphrase service
    expect(qa(keywords.element, ".suggestion-chip").length).toBeGreaterThan(0);

    // cite the top card
    click(q(cards[0], ".cite-button"));
    await settle(discovery);

    const ms = app.manuscript!;
    expect(ms.references).toHaveLength(1);
    expect(ms.references[0].doc_id).toBe("d2");
    const markerSpan = ms.spans.find((s) => s.citation_marker !== null);
    expect(markerSpan?.text).toBe("[1]");

    // marker rendered after the claim, reference listed at document end
    const renderedMarker = q(write.element, ".citation-marker");
    expect(renderedMarker.textContent).toContain("[1]");
    const referenceEntries = qa(write.element, ".reference-entry");
    expect(referenceEntries).toHaveLength(1);
    expect(referenceEntries[0].textContent).toContain("Zebra finch song structure");

    // nothing generated: the ethics report stays clean
    await write.refreshEthics();
    expect(write.report?.clean).toBe(true);
    expect(q(write.element, ".ethics-clean").textContent).toContain("clean");
  });

  it("reuses the reference number on repeat citations", async () => {
    const app = await bootApp("recall_and_cite");
    const write = panel<WritePanel>(app, "write-1");

    type(q(write.element, ".compose-input"), "A claim. ");
    pressEnter(q(write.element, ".compose-input"));
    await settle(write);

    await app.citeAtCursor("d2");
    await app.citeAtCursor("d2");
    expect(app.manuscript!.references).toHaveLength(1);
    const markers = app.manuscript!.spans.filter((s) => s.citation_marker !== null);
    expect(markers.map((m) => m.text)).toEqual(["[1]", "[1]"]);
  });
});
