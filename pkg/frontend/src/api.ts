// Typed client of the registry HTTP API. Uses global fetch, so it runs in
// the browser and in node tests alike.

export interface SearchHit {
  uri: string;
  label: string;
  kind: "step" | "workflow" | "execution" | "other";
  description: string;
  score: number;
}

export interface QueryResult {
  vars: string[];
  rows: (string | number)[][];
}

export class ApiError extends Error {
  constructor(message: string, public status: number) {
    super(message);
  }
}

async function fail(response: Response): Promise<never> {
  let message = `HTTP ${response.status}`;
  try {
    const doc = await response.json();
    if (doc.error) message = doc.error;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(message, response.status);
}

export class RegistryApi {
  constructor(public baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  code(uri: string): string {
    const bare = uri.split("#")[0];
    return bare.slice(bare.lastIndexOf("/") + 1);
  }

  async search(q: string): Promise<SearchHit[]> {
    const response = await fetch(this.url(`/search?q=${encodeURIComponent(q)}`));
    if (!response.ok) await fail(response);
    return response.json();
  }

  async list(kind: string): Promise<SearchHit[]> {
    const response = await fetch(this.url(`/list?kind=${encodeURIComponent(kind)}`));
    if (!response.ok) await fail(response);
    return response.json();
  }

  async fetchTrig(uri: string): Promise<string> {
    const response = await fetch(this.url(`/np/${this.code(uri)}`));
    if (!response.ok) await fail(response);
    return response.text();
  }

  async fetchTemplate(uri: string): Promise<string> {
    const response = await fetch(this.url(`/np/${this.code(uri)}/template`));
    if (!response.ok) await fail(response);
    return response.text();
  }

  async query(text: string): Promise<QueryResult> {
    const response = await fetch(this.url("/query"), { method: "POST", body: text });
    if (!response.ok) await fail(response);
    return response.json();
  }

  async publishManifest(yaml: string): Promise<string[]> {
    const response = await fetch(this.url("/publish"), { method: "POST", body: yaml });
    if (!response.ok) await fail(response);
    return (await response.json()).uris;
  }
}
