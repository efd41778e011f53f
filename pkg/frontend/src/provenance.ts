// Lineage traversal over the documented /query endpoint: prospective and
// retrospective links around one URI, resolved into a small graph.

import { RegistryApi } from "./api.js";
import { ProvenanceEdge, ProvenanceGraph, ProvenanceNode } from "./views.js";

const PREFIXES = `PREFIX p-plan: <http://purl.org/net/p-plan#>
PREFIX prov: <http://www.w3.org/ns/prov#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
PREFIX plex: <http://purl.org/plexflow#>
PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
`;

async function rows(api: RegistryApi, body: string): Promise<(string | number)[][]> {
  const result = await api.query(PREFIXES + body);
  return result.rows;
}

const KIND_BY_TYPE: Record<string, ProvenanceNode["kind"]> = {
  "http://purl.org/net/p-plan#Plan": "plan",
  "http://purl.org/net/p-plan#Step": "step",
  "http://purl.org/net/p-plan#Activity": "activity",
  "http://www.w3.org/ns/prov#Bundle": "execution",
};

export async function buildLineage(api: RegistryApi, focus: string): Promise<ProvenanceGraph> {
  const edges: ProvenanceEdge[] = [];
  const uris = new Set<string>([focus]);

  const record = (from: string, relation: string, to: string) => {
    edges.push({ from, relation, to });
    uris.add(from);
    uris.add(to);
  };

  // prospective: plan membership around the focus (either side)
  for (const [step] of await rows(api, `SELECT ?s WHERE { ?s p-plan:isStepOfPlan <${focus}> }`)) {
    record(String(step), "isStepOfPlan", focus);
  }
  for (const [plan] of await rows(api, `SELECT ?p WHERE { <${focus}> p-plan:isStepOfPlan ?p }`)) {
    record(focus, "isStepOfPlan", String(plan));
  }

  // step derivations in both directions
  for (const [origin] of await rows(api, `SELECT ?o WHERE { <${focus}> prov:wasDerivedFrom ?o }`)) {
    record(focus, "wasDerivedFrom", String(origin));
  }
  const frontier = [...uris];
  for (const uri of frontier) {
    for (const [origin] of await rows(api, `SELECT ?o WHERE { <${uri}> prov:wasDerivedFrom ?o }`)) {
      record(uri, "wasDerivedFrom", String(origin));
    }
    // retrospective: runs derived from a plan, activities per step
    for (const [run] of await rows(api, `SELECT ?r WHERE { ?r prov:wasDerivedFrom <${uri}> . ?r a prov:Bundle }`)) {
      record(String(run), "wasDerivedFrom", uri);
      for (const [act] of await rows(api, `SELECT ?a WHERE { <${String(run)}> plex:includesActivity ?a }`)) {
        record(String(run), "includesActivity", String(act));
      }
    }
    for (const [act] of await rows(api, `SELECT ?a WHERE { ?a p-plan:correspondsToStep <${uri}> }`)) {
      record(String(act), "correspondsToStep", uri);
    }
  }

  const nodes: ProvenanceNode[] = [];
  for (const uri of uris) {
    const typeRows = await rows(api, `SELECT ?t WHERE { <${uri}> a ?t }`);
    const kinds = typeRows.map(([t]) => KIND_BY_TYPE[String(t)]).filter(Boolean);
    const labelRows = await rows(api, `SELECT ?l WHERE { <${uri}> rdfs:label ?l }`);
    const known = kinds.length > 0 || labelRows.length > 0;
    nodes.push({
      uri,
      kind: known ? (kinds[0] ?? "execution") : "unresolved",
      label: labelRows.length ? String(labelRows[0][0]) : known ? uri.split("#").pop() ?? uri : "",
    });
  }
  return { focus, nodes, edges };
}
