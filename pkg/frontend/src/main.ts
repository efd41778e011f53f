// DOM wiring: hash routes #/search, #/compose, #/prov/<uri>, #/np/<uri>.
// All rendering goes through the pure view functions.

import { RegistryApi } from "./api.js";
import { ComposerState, PlacedStep, composerToYaml, validateComposer } from "./manifest.js";
import { stepCardFromTrig } from "./model.js";
import { buildLineage } from "./provenance.js";
import {
  escapeHtml,
  renderComposer,
  renderHits,
  renderProvenance,
  renderStepDetail,
} from "./views.js";

const api = new RegistryApi("");
const app = document.getElementById("app") as HTMLElement;
const status = document.getElementById("status") as HTMLElement;

const composer: ComposerState = {
  label: "",
  description: "",
  inputs: [],
  outputs: [],
  steps: [],
};
let publishedUris: string[] = [];

function note(message: string, isError = false) {
  status.textContent = message;
  status.className = isError ? "error" : "";
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    note("");
    return await work();
  } catch (error) {
    note(error instanceof Error ? error.message : String(error), true);
    return undefined;
  }
}

// -- routes -----------------------------------------------------------------

async function showSearch(q: string) {
  const box = `<form id="search-form"><input id="search-box" value="${escapeHtml(q)}"
    placeholder="search published steps and workflows"><button>search</button></form>`;
  if (!q) {
    app.innerHTML = box + '<p class="empty">Type a search, e.g. <b>blur</b>.</p>';
    return;
  }
  await guard(async () => {
    const hits = await api.search(q);
    app.innerHTML = box + renderHits(hits, q);
  });
}

async function showDetail(uri: string) {
  await guard(async () => {
    const trig = await api.fetchTrig(uri);
    const card = stepCardFromTrig(trig);
    const template = await api.fetchTemplate(uri);
    app.innerHTML = renderStepDetail(card, trig, template);
  });
}

function showComposer() {
  app.innerHTML = renderComposer(composer, validateComposer(composer), publishedUris);
}

async function showProvenance(uri: string) {
  await guard(async () => {
    const graph = await buildLineage(api, uri);
    app.innerHTML = renderProvenance(graph);
  });
}

async function route() {
  const hash = location.hash || "#/search";
  publishedUris = hash.startsWith("#/compose") ? publishedUris : [];
  if (hash.startsWith("#/search")) {
    const q = new URLSearchParams(hash.split("?")[1] ?? "").get("q") ?? "";
    await showSearch(q);
  } else if (hash.startsWith("#/compose")) {
    showComposer();
  } else if (hash.startsWith("#/prov/")) {
    await showProvenance(decodeURIComponent(hash.slice("#/prov/".length)));
  } else if (hash.startsWith("#/np/")) {
    await showDetail(decodeURIComponent(hash.slice("#/np/".length)));
  }
}

// -- composer actions ---------------------------------------------------------

async function addStepByUri(uri: string) {
  await guard(async () => {
    const card = stepCardFromTrig(await api.fetchTrig(uri));
    const id = `s${composer.steps.length + 1}`;
    composer.steps.push({
      id,
      uses: card.uri,
      bind: {},
      inputNames: card.inputs.map((v) => v.name),
      outputNames: card.outputs.map((v) => v.name),
    });
    location.hash = "#/compose";
    showComposer();
    note(`added ${card.label} as ${id}`);
  });
}

function addInlineStep() {
  const code = prompt("builtin code (e.g. builtin:concat)", "builtin:identity") ?? "builtin:identity";
  const inputs = (prompt("input names, comma separated", "x") ?? "x")
    .split(",").map((s) => s.trim()).filter(Boolean);
  const label = prompt("step label", "my step") ?? "my step";
  const id = `s${composer.steps.length + 1}`;
  const step: PlacedStep = {
    id,
    inline: { label, code, inputs, outputs: ["out"] },
    bind: {},
    inputNames: inputs,
    outputNames: ["out"],
  };
  composer.steps.push(step);
  showComposer();
}

function syncComposerFromDom() {
  composer.label = (document.getElementById("wf-label") as HTMLInputElement)?.value ?? composer.label;
  composer.description =
    (document.getElementById("wf-description") as HTMLInputElement)?.value ?? composer.description;
  const csv = (id: string) =>
    ((document.getElementById(id) as HTMLInputElement)?.value ?? "")
      .split(",").map((s) => s.trim()).filter(Boolean);
  composer.inputs = csv("wf-inputs");
  composer.outputs = csv("wf-outputs");
  const bindInputs = Array.from(app.querySelectorAll<HTMLInputElement>("input[data-bind]"));
  for (const input of bindInputs) {
    const [sid, name] = input.dataset.bind!.split(".");
    const step = composer.steps.find((s) => s.id === sid);
    if (step) {
      if (input.value) step.bind[name] = input.value;
      else delete step.bind[name];
    }
  }
}

function download(name: string, text: string) {
  const link = document.createElement("a");
  link.href = URL.createObjectURL(new Blob([text], { type: "text/yaml" }));
  link.download = name;
  link.click();
  URL.revokeObjectURL(link.href);
}

async function publishComposed() {
  syncComposerFromDom();
  const diagnostics = validateComposer(composer);
  if (diagnostics.length) {
    showComposer();
    return;
  }
  await guard(async () => {
    publishedUris = await api.publishManifest(composerToYaml(composer));
    showComposer();
    note(`published ${publishedUris.length} nanopubs`);
  });
}

// -- event delegation ---------------------------------------------------------

document.addEventListener("submit", (event) => {
  const form = event.target as HTMLElement;
  if (form.id === "search-form") {
    event.preventDefault();
    const q = (document.getElementById("search-box") as HTMLInputElement).value;
    location.hash = `#/search?q=${encodeURIComponent(q)}`;
  }
});

document.addEventListener("click", async (event) => {
  const button = (event.target as HTMLElement).closest("[data-action]") as HTMLElement | null;
  if (!button) return;
  const uri = button.dataset.uri ?? "";
  switch (button.dataset.action) {
    case "open":
      location.hash = `#/np/${encodeURIComponent(uri)}`;
      break;
    case "provenance":
      location.hash = `#/prov/${encodeURIComponent(uri)}`;
      break;
    case "add-to-composer":
      await addStepByUri(uri);
      break;
    case "add-inline":
      syncComposerFromDom();
      addInlineStep();
      break;
    case "remove-step":
      syncComposerFromDom();
      composer.steps = composer.steps.filter((s) => s.id !== button.dataset.step);
      showComposer();
      break;
    case "download":
      syncComposerFromDom();
      download("workflow.yaml", composerToYaml(composer));
      break;
    case "publish":
      await publishComposed();
      break;
    case "copy-template": {
      const text = await guard(() => api.fetchTemplate(uri));
      if (text !== undefined) {
        await navigator.clipboard.writeText(text);
        note("template copied to clipboard");
      }
      break;
    }
  }
});

document.addEventListener("change", (event) => {
  const el = event.target as HTMLElement;
  if (el.closest(".composer")) {
    syncComposerFromDom();
    showComposer();
  }
});

window.addEventListener("hashchange", route);
route();
