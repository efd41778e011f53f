// View renderers are pure functions from data to HTML strings, so they can
// be tested without a DOM. main.ts owns event wiring.

import { SearchHit } from "./api.js";
import { ComposerState, PlacedStep } from "./manifest.js";
import { StepCard } from "./model.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const e = escapeHtml;

export function renderHits(hits: SearchHit[], q: string): string {
  if (!hits.length) {
    return `<p class="empty">No published steps or workflows match <b>${e(q)}</b>.</p>`;
  }
  const cards = hits.map(
    (hit) => `
    <article class="hit" data-uri="${e(hit.uri)}">
      <header>
        <span class="kind kind-${hit.kind}">${hit.kind}</span>
        <h3>${e(hit.label) || "(unlabeled)"}</h3>
        <span class="score">score ${hit.score}</span>
      </header>
      <p>${e(hit.description)}</p>
      <code class="uri">${e(hit.uri)}</code>
      <nav>
        <button data-action="open" data-uri="${e(hit.uri)}">open</button>
        ${hit.kind === "step" ? `<button data-action="add-to-composer" data-uri="${e(hit.uri)}">use in composer</button>` : ""}
        <button data-action="provenance" data-uri="${e(hit.uri)}">provenance</button>
      </nav>
    </article>`,
  );
  return `<div class="hits">${cards.join("\n")}</div>`;
}

function variableList(title: string, vars: { name: string; semanticTypes: string[] }[]): string {
  if (!vars.length) return "";
  const items = vars
    .map((v) => `<li><code>${e(v.name)}</code>${v.semanticTypes.map((t) => ` <small>${e(t)}</small>`).join("")}</li>`)
    .join("");
  return `<h4>${title}</h4><ul class="vars">${items}</ul>`;
}

export function renderStepDetail(card: StepCard, trig: string, template: string): string {
  return `
  <article class="detail">
    <h2>${e(card.label)}</h2>
    ${card.isManual ? '<p class="badge">manual task</p>' : ""}
    ${card.description ? `<p>${e(card.description)}</p>` : ""}
    ${card.derivedFrom ? `<p class="lineage">derived from <a href="#/prov/${encodeURIComponent(card.derivedFrom)}"><code>${e(card.derivedFrom)}</code></a></p>` : ""}
    ${variableList("Inputs", card.inputs)}
    ${variableList("Outputs", card.outputs)}
    <div class="tabs">
      <input type="radio" name="tab" id="tab-code" checked><label for="tab-code">code</label>
      <input type="radio" name="tab" id="tab-trig"><label for="tab-trig">TriG</label>
      <pre class="tab-code"><code>${e(template)}</code></pre>
      <pre class="tab-trig"><code>${e(trig)}</code></pre>
    </div>
    <nav>
      <button data-action="copy-template" data-uri="${e(card.uri)}">copy as template</button>
      <button data-action="add-to-composer" data-uri="${e(card.uri)}">use in composer</button>
    </nav>
  </article>`;
}

function renderPlacedStep(step: PlacedStep): string {
  const source = step.uses
    ? `<code class="uri">${e(step.uses)}</code>`
    : `<code>${e(step.inline?.code ?? "")}</code>`;
  const binds = step.inputNames
    .map((name) => {
      const spec = step.bind[name] ?? "";
      return `<li>${e(name)} ← <input data-bind="${e(step.id)}.${e(name)}" value="${e(spec)}" placeholder="workflow.x | const:v | step.out"></li>`;
    })
    .join("");
  return `
  <li class="placed" data-step="${e(step.id)}">
    <header><b>${e(step.id)}</b> ${source}
      <button data-action="remove-step" data-step="${e(step.id)}">remove</button>
    </header>
    <ul class="binds">${binds}</ul>
    <small>outputs: ${step.outputNames.map((o) => `${e(step.id)}.${e(o)}`).join(", ")}</small>
  </li>`;
}

export function renderComposer(
  state: ComposerState,
  diagnostics: string[],
  publishedUris: string[],
): string {
  const valid = diagnostics.length === 0 && state.steps.length > 0;
  const diagnosticList = diagnostics.length
    ? `<ul class="diagnostics">${diagnostics.map((d) => `<li>${e(d)}</li>`).join("")}</ul>`
    : state.steps.length
      ? '<p class="ok">manifest is valid</p>'
      : "";
  const published = publishedUris.length
    ? `<section class="published"><h3>published ${publishedUris.length} nanopubs</h3><ol>${publishedUris
        .map((u) => `<li><a href="#/np/${encodeURIComponent(u)}"><code>${e(u)}</code></a></li>`)
        .join("")}</ol></section>`
    : "";
  return `
  <section class="composer">
    <label>label <input id="wf-label" value="${e(state.label)}"></label>
    <label>description <input id="wf-description" value="${e(state.description)}"></label>
    <label>workflow inputs <input id="wf-inputs" value="${e(state.inputs.join(", "))}" placeholder="image, mask"></label>
    <label>workflow outputs <input id="wf-outputs" value="${e(state.outputs.join(", "))}" placeholder="s1.out"></label>
    <ol class="steps">${state.steps.map(renderPlacedStep).join("\n")}</ol>
    <nav>
      <button data-action="add-inline">add inline step</button>
      <button data-action="download" ${valid ? "" : "disabled"}>download manifest</button>
      <button data-action="publish" ${valid ? "" : "disabled"}>publish</button>
    </nav>
    ${diagnosticList}
    ${published}
  </section>`;
}

export interface ProvenanceNode {
  uri: string;
  kind: "plan" | "step" | "activity" | "execution" | "unresolved";
  label: string;
}

export interface ProvenanceEdge {
  from: string;
  to: string;
  relation: string;
}

export interface ProvenanceGraph {
  focus: string;
  nodes: ProvenanceNode[];
  edges: ProvenanceEdge[];
}

export function renderProvenance(graph: ProvenanceGraph): string {
  const byUri = new Map(graph.nodes.map((n) => [n.uri, n]));
  const node = (uri: string) => {
    const n = byUri.get(uri);
    const label = n && n.label ? e(n.label) : "<i>unresolved</i>";
    const kind = n ? n.kind : "unresolved";
    return `<a class="node node-${kind}" data-action="open" data-uri="${e(uri)}" title="${e(uri)}">${label}</a>`;
  };
  const edges = graph.edges
    .map((edge) => `<li>${node(edge.from)} <span class="rel">${e(edge.relation)}</span> ${node(edge.to)}</li>`)
    .join("\n");
  const lone = graph.nodes
    .filter((n) => !graph.edges.some((edge) => edge.from === n.uri || edge.to === n.uri))
    .map((n) => `<li>${node(n.uri)}</li>`)
    .join("\n");
  return `
  <section class="provenance">
    <h2>lineage of <code>${e(graph.focus)}</code></h2>
    ${graph.edges.length ? `<ul class="edges">${edges}</ul>` : "<p class='empty'>no links recorded</p>"}
    ${lone ? `<ul class="lone">${lone}</ul>` : ""}
  </section>`;
}
