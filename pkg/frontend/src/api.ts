// Typed client for the combine-service HTTP API. All reasoning happens on
// the server; this module only moves JSON.

export interface Rational {
  num: number;
  den: number;
}

export type ScenarioStatus =
  | "inconsistent"
  | "trivial"
  | "modifier_preferred"
  | "dominated"
  | "selected";

export interface ScenarioRow {
  bits: string;
  probability: Rational;
  status: ScenarioStatus;
  block: number;
}

export interface CombineResult {
  compound: string;
  head: string;
  modifiers: string[];
  scenarios: ScenarioRow[];
  selected: string[];
}

export interface WorkspaceEntry {
  kb_id: string;
  name: string;
  parent: string | null;
  created_at: string;
}

export interface CombineDraft {
  head: string;
  modifiers: string[];
  exactly_k?: number | null;
  include_all?: boolean;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(`${base}${path}`, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(response.status, (body as { detail?: string }).detail ?? response.statusText);
  }
  return body as T;
}

export class ServiceClient {
  constructor(readonly base: string = "") {}

  uploadKb(name: string, source: string): Promise<{ kb_id: string }> {
    return request(this.base, "/api/kbs", {
      method: "POST",
      body: JSON.stringify({ name, source }),
    });
  }

  listKbs(): Promise<{ kbs: WorkspaceEntry[] }> {
    return request(this.base, "/api/kbs");
  }

  getKb(kbId: string): Promise<{ entry: WorkspaceEntry; source: string }> {
    return request(this.base, `/api/kbs/${kbId}`);
  }

  lineage(kbId: string): Promise<{ lineage: WorkspaceEntry[] }> {
    return request(this.base, `/api/kbs/${kbId}/lineage`);
  }

  combine(kbId: string, draft: CombineDraft): Promise<CombineResult> {
    return request(this.base, `/api/kbs/${kbId}/combine`, {
      method: "POST",
      body: JSON.stringify({
        head: draft.head,
        modifiers: draft.modifiers,
        exactly_k: draft.exactly_k ?? null,
        include_all: draft.include_all ?? true,
      }),
    });
  }

  revise(
    kbId: string,
    draft: CombineDraft,
    scenarioBits: string,
    alias?: string,
  ): Promise<{ kb_id: string }> {
    return request(this.base, `/api/kbs/${kbId}/revise`, {
      method: "POST",
      body: JSON.stringify({
        head: draft.head,
        modifiers: draft.modifiers,
        exactly_k: draft.exactly_k ?? null,
        scenario_bits: scenarioBits,
        alias: alias ?? null,
      }),
    });
  }

  query(kbId: string, assertion: string, prior?: string): Promise<{ probability: Rational; decimal: string }> {
    return request(this.base, `/api/kbs/${kbId}/query`, {
      method: "POST",
      body: JSON.stringify({ assertion, prior: prior ?? null }),
    });
  }

  rank(kbId: string, concept: string): Promise<{ rank: number | "inf" }> {
    return request(this.base, `/api/kbs/${kbId}/rank?concept=${encodeURIComponent(concept)}`);
  }
}
