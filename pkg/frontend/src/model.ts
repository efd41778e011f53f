// Step cards parsed straight from a fetched nanopub's assertion graph —
// the UI never invents metadata that is not in the RDF.

import { ParsedTrig, Quad, Term, firstObject, objectsOf, parseTrig } from "./trig.js";

const RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label";
const DCT_DESCRIPTION = "http://purl.org/dc/terms/description";
const PPLAN = "http://purl.org/net/p-plan#";
const PROV = "http://www.w3.org/ns/prov#";
const PLEX = "http://purl.org/plexflow#";

export const PREDICATES = {
  type: RDF_TYPE,
  label: RDFS_LABEL,
  description: DCT_DESCRIPTION,
  hasInputVar: PPLAN + "hasInputVar",
  hasOutputVar: PPLAN + "hasOutputVar",
  isStepOfPlan: PPLAN + "isStepOfPlan",
  correspondsToStep: PPLAN + "correspondsToStep",
  wasDerivedFrom: PROV + "wasDerivedFrom",
  sourceCode: PLEX + "hasSourceCode",
  codeKind: PLEX + "codeKind",
  position: PLEX + "position",
  includesActivity: PLEX + "includesActivity",
  hasAssertion: "http://www.nanopub.org/nschema#hasAssertion",
};

export const TYPES = {
  step: PPLAN + "Step",
  plan: PPLAN + "Plan",
  activity: PPLAN + "Activity",
  variable: PPLAN + "Variable",
  manualTask: PLEX + "ManualTask",
  bundle: PROV + "Bundle",
};

export interface VariableInfo {
  name: string;
  semanticTypes: string[];
}

export interface StepCard {
  uri: string;
  label: string;
  description: string;
  codeKind: string;
  code: string;
  isManual: boolean;
  inputs: VariableInfo[];
  outputs: VariableInfo[];
  derivedFrom?: string;
}

function fragmentName(iri: string, tag: string): string {
  const fragment = iri.includes("#") ? iri.slice(iri.indexOf("#") + 1) : iri;
  return fragment.startsWith(tag + ".") ? fragment.slice(tag.length + 1) : fragment;
}

function parseVariables(quads: Quad[], step: string, predicate: string, tag: string): VariableInfo[] {
  const entries: { position: number; info: VariableInfo }[] = [];
  for (const node of objectsOf(quads, step, predicate)) {
    if (node.kind !== "iri") continue;
    const types = objectsOf(quads, node.value, RDF_TYPE)
      .map((t) => t.value)
      .filter((v) => v !== TYPES.variable);
    const pos = firstObject(quads, node.value, PREDICATES.position);
    entries.push({
      position: pos ? parseInt(pos.value, 10) : 1e9,
      info: { name: fragmentName(node.value, tag), semanticTypes: types },
    });
  }
  entries.sort((a, b) => a.position - b.position || a.info.name.localeCompare(b.info.name));
  return entries.map((e) => e.info);
}

// The assertion graph of a nanopub is the graph its head points at.
export function assertionQuads(doc: ParsedTrig): Quad[] {
  const head = doc.quads.find((q) => q.predicate.value === PREDICATES.hasAssertion);
  if (!head) throw new Error("document has no nanopub head");
  const graph = head.object.value;
  return doc.quads.filter((q) => q.graph.value === graph);
}

export function nanopubUri(doc: ParsedTrig): string {
  const head = doc.quads.find((q) => q.predicate.value === PREDICATES.hasAssertion);
  if (!head) throw new Error("document has no nanopub head");
  return head.subject.value;
}

export function stepCardFromTrig(text: string): StepCard {
  const doc = parseTrig(text);
  const quads = assertionQuads(doc);
  const uri = nanopubUri(doc) + "#step";
  const types = objectsOf(quads, uri, RDF_TYPE).map((t: Term) => t.value);
  if (!types.includes(TYPES.step)) throw new Error(`${uri} is not a step`);
  const label = firstObject(quads, uri, RDFS_LABEL);
  if (!label) throw new Error(`${uri} has no label`);
  return {
    uri,
    label: label.value,
    description: firstObject(quads, uri, DCT_DESCRIPTION)?.value ?? "",
    codeKind: firstObject(quads, uri, PREDICATES.codeKind)?.value ?? "external",
    code: firstObject(quads, uri, PREDICATES.sourceCode)?.value ?? "",
    isManual: types.includes(TYPES.manualTask),
    inputs: parseVariables(quads, uri, PREDICATES.hasInputVar, "in"),
    outputs: parseVariables(quads, uri, PREDICATES.hasOutputVar, "out"),
    derivedFrom: firstObject(quads, uri, PREDICATES.wasDerivedFrom)?.value,
  };
}
