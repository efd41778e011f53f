// End-to-end against a seeded local registry: search renders the expected
// card, composing and publishing a 3-step workflow yields 4 URIs, and the
// downloadable manifest passes the CLI's dry-run.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { RegistryApi } from "../src/api.js";
import { ComposerState, composerToYaml, validateComposer } from "../src/manifest.js";
import { stepCardFromTrig } from "../src/model.js";
import { buildLineage } from "../src/provenance.js";
import { renderComposer, renderHits } from "../src/views.js";

const REPO = resolve(__dirname, "..", "..");
const PORT = 8700 + Math.floor(Math.random() * 200);

let work: string;
let env: NodeJS.ProcessEnv;
let server: ChildProcess;
let api: RegistryApi;
let blurUri = "";

function cli(...args: string[]): string {
  return execFileSync("python3", ["-m", "plexflow.cli", ...args], {
    env,
    cwd: REPO,
    encoding: "utf8",
  });
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), "plexflow-ui-"));
  env = {
    ...process.env,
    PLEXFLOW_REGISTRY: join(work, "registry"),
    PLEXFLOW_PROFILE: join(work, "profile.yaml"),
  };
  cli("profile", "init", "--name", "UI Tester");
  blurUri = cli("publish", join(REPO, "tests", "fixtures", "blur_step.yaml")).trim();

  server = spawn(
    "python3",
    ["-m", "plexflow.cli", "serve", "--port", String(PORT), "--data", join(work, "registry")],
    { env, cwd: REPO, stdio: "ignore" },
  );
  api = new RegistryApi(`http://127.0.0.1:${PORT}`);
  const deadline = Date.now() + 15000;
  for (;;) {
    try {
      await api.search("ping");
      break;
    } catch {
      if (Date.now() > deadline) throw new Error("registry server did not come up");
      await new Promise((r) => setTimeout(r, 150));
    }
  }
}, 30000);

afterAll(() => {
  server?.kill();
});

describe("search against the live registry", () => {
  it("renders the blur step as the first card", async () => {
    const hits = await api.search("blur");
    expect(hits.length).toBeGreaterThan(0);
    expect(hits[0].label).toBe("Add blur to image");
    expect(hits[0].uri).toBe(blurUri);
    const html = renderHits(hits, "blur");
    expect(html.indexOf("Add blur to image")).toBeGreaterThan(-1);
  });

  it("step detail comes from the fetched assertion", async () => {
    const trig = await api.fetchTrig(blurUri);
    const card = stepCardFromTrig(trig);
    expect(card.label).toBe("Add blur to image");
    expect(card.inputs.map((v) => v.name)).toEqual(["img", "mark"]);
    const template = await api.fetchTemplate(blurUri);
    expect(template).toContain("# label: Add blur to image");
  });
});

function threeStepState(): ComposerState {
  return {
    label: "composed in the browser",
    description: "blur then trace then level",
    inputs: ["image"],
    outputs: ["s3.out"],
    steps: [
      {
        id: "s1",
        uses: blurUri,
        bind: { img: "workflow.image", mark: "const:~blur" },
        inputNames: ["img", "mark"],
        outputNames: ["out"],
      },
      {
        id: "s2",
        inline: { label: "Trace image edges", code: "builtin:upper", inputs: ["img"], outputs: ["out"] },
        bind: { img: "s1.out" },
        inputNames: ["img"],
        outputNames: ["out"],
      },
      {
        id: "s3",
        inline: { label: "Level image", code: "builtin:lower", inputs: ["img"], outputs: ["out"] },
        bind: { img: "s2.out" },
        inputNames: ["img"],
        outputNames: ["out"],
      },
    ],
  };
}

describe("compose and publish", () => {
  it("publishes a 3-step workflow as 4 nanopubs and renders them", async () => {
    const state = threeStepState();
    expect(validateComposer(state)).toEqual([]);
    const uris = await api.publishManifest(composerToYaml(state));
    expect(uris).toHaveLength(4);
    const html = renderComposer(state, [], uris);
    expect(html).toContain("published 4 nanopubs");
    for (const uri of uris) expect(html).toContain(uri);
  });

  it("downloaded manifest passes the CLI dry run", () => {
    const file = join(work, "downloaded.yaml");
    writeFileSync(file, composerToYaml(threeStepState()));
    const out = cli("--format", "json", "publish", "--dry-run", file);
    const doc = JSON.parse(out);
    expect(doc.dry_run).toBe(true);
    expect(doc.uris).toHaveLength(4);
  });

  it("cycle diagnostics disable publishing", () => {
    const state = threeStepState();
    state.steps[0].bind.img = "s3.out";
    const diagnostics = validateComposer(state);
    expect(diagnostics.some((d) => d.startsWith("cycle:"))).toBe(true);
    expect(renderComposer(state, diagnostics, [])).toMatch(/data-action="publish" disabled/);
  });

  it("client-side validity matches server-side acceptance", async () => {
    // invalid on the client (unbound input) must also be rejected by the server
    const state = threeStepState();
    delete state.steps[1].bind.img;
    expect(validateComposer(state).length).toBeGreaterThan(0);
    await expect(api.publishManifest(composerToYaml(state))).rejects.toThrow(/unbound input/);
  });
});

describe("provenance view", () => {
  it("links the derived step back to its origin", async () => {
    const uris = await api.publishManifest(composerToYaml(threeStepState()));
    const planUri = uris[uris.length - 1] + "#plan";
    const graph = await buildLineage(api, planUri);
    const derivations = graph.edges.filter((e) => e.relation === "wasDerivedFrom");
    expect(derivations.some((e) => e.to === blurUri + "#step")).toBe(true);
    const members = graph.edges.filter((e) => e.relation === "isStepOfPlan");
    expect(members).toHaveLength(3);
  });
});
