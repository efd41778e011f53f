import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { SearchHit } from "../src/api.js";
import { validateComposer } from "../src/manifest.js";
import { stepCardFromTrig } from "../src/model.js";
import {
  renderComposer,
  renderHits,
  renderProvenance,
  renderStepDetail,
} from "../src/views.js";

const blurTrig = readFileSync(new URL("./fixtures/blur_step.trig", import.meta.url), "utf8");

const hit: SearchHit = {
  uri: "http://purl.org/np/RAblur",
  label: "Add blur to image",
  kind: "step",
  description: "soften the image",
  score: 2,
};

describe("renderHits", () => {
  it("renders ranked cards with the label first", () => {
    const html = renderHits([hit, { ...hit, uri: "http://purl.org/np/RAother", label: "Blend two images", score: 1 }], "blur");
    const first = html.indexOf("Add blur to image");
    const second = html.indexOf("Blend two images");
    expect(first).toBeGreaterThan(-1);
    expect(first).toBeLessThan(second);
    expect(html).toContain('data-action="add-to-composer"');
  });

  it("shows an empty state", () => {
    expect(renderHits([], "zzz")).toContain("No published steps");
  });

  it("escapes markup in labels", () => {
    const html = renderHits([{ ...hit, label: "<script>alert(1)</script>" }], "x");
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("renderStepDetail", () => {
  it("shows code and TriG tabs plus the template action", () => {
    const card = stepCardFromTrig(blurTrig);
    const html = renderStepDetail(card, blurTrig, "# template\nbuiltin:concat\n");
    expect(html).toContain("tab-code");
    expect(html).toContain("tab-trig");
    expect(html).toContain("copy-template");
    expect(html).toContain("@prefix np:");  // TriG tab holds the fetched document
    expect(html).toContain("builtin:concat");
  });
});

describe("renderComposer", () => {
  it("disables publish while diagnostics exist", () => {
    const state = {
      label: "wf",
      description: "",
      inputs: [],
      outputs: [],
      steps: [
        {
          id: "s1",
          uses: "http://purl.org/np/RAblur",
          bind: {},
          inputNames: ["img"],
          outputNames: ["out"],
        },
      ],
    };
    const diagnostics = validateComposer(state);
    expect(diagnostics).toContain("unbound input s1.img");
    const html = renderComposer(state, diagnostics, []);
    expect(html).toMatch(/data-action="publish" disabled/);
    expect(html).toContain("unbound input s1.img");
  });

  it("enables publish and lists published URIs when valid", () => {
    const state = {
      label: "wf",
      description: "",
      inputs: ["image"],
      outputs: ["s1.out"],
      steps: [
        {
          id: "s1",
          uses: "http://purl.org/np/RAblur",
          bind: { img: "workflow.image" },
          inputNames: ["img"],
          outputNames: ["out"],
        },
      ],
    };
    const html = renderComposer(state, validateComposer(state), [
      "http://purl.org/np/RAone",
      "http://purl.org/np/RAtwo",
    ]);
    expect(html).toMatch(/data-action="publish" >/);
    expect(html).toContain("published 2 nanopubs");
    expect(html).toContain("RAone");
  });
});

describe("renderProvenance", () => {
  it("renders edges and marks unresolved nodes", () => {
    const html = renderProvenance({
      focus: "http://purl.org/np/RAplan#plan",
      nodes: [
        { uri: "http://purl.org/np/RAplan#plan", kind: "plan", label: "sketch plan" },
        { uri: "http://purl.org/np/RAstep#step", kind: "step", label: "Add blur to image" },
        { uri: "http://purl.org/np/RAgone#step", kind: "unresolved", label: "" },
      ],
      edges: [
        {
          from: "http://purl.org/np/RAstep#step",
          to: "http://purl.org/np/RAplan#plan",
          relation: "isStepOfPlan",
        },
        {
          from: "http://purl.org/np/RAstep#step",
          to: "http://purl.org/np/RAgone#step",
          relation: "wasDerivedFrom",
        },
      ],
    });
    expect(html).toContain("isStepOfPlan");
    expect(html).toContain("node-unresolved");
    expect(html).toContain("sketch plan");
    expect(html).toContain('data-action="open"');
  });
});
