// The invention decision loop: choose head and modifiers, run combine,
// pick one scenario from the surviving block, name the compound, commit the
// revision, and carry on from the child KB. All reasoning is server-side.

import type { CombineDraft, CombineResult, ServiceClient, WorkspaceEntry } from "./api.js";

export interface SessionState {
  activeKbId: string | null;
  draft: CombineDraft;
  lastResult: CombineResult | null;
  pinnedScenario: string | null;
  lineage: WorkspaceEntry[];
}

export function initialState(): SessionState {
  return {
    activeKbId: null,
    draft: { head: "", modifiers: [], exactly_k: null, include_all: true },
    lastResult: null,
    pinnedScenario: null,
    lineage: [],
  };
}

export async function activateKb(
  client: ServiceClient,
  state: SessionState,
  kbId: string,
): Promise<SessionState> {
  const { lineage } = await client.lineage(kbId);
  return { ...state, activeKbId: kbId, lastResult: null, pinnedScenario: null, lineage };
}

export async function runCombine(
  client: ServiceClient,
  state: SessionState,
  draft: CombineDraft,
): Promise<SessionState> {
  if (state.activeKbId === null) throw new Error("no knowledge base selected");
  const lastResult = await client.combine(state.activeKbId, { ...draft, include_all: true });
  return { ...state, draft, lastResult, pinnedScenario: null };
}

export function pinScenario(state: SessionState, bits: string): SessionState {
  if (!state.lastResult || !state.lastResult.selected.includes(bits)) {
    throw new Error(`scenario ${bits} is not in the surviving block`);
  }
  return { ...state, pinnedScenario: bits };
}

/** Swap the head with the first modifier and rerun the combination. */
export function swappedDraft(draft: CombineDraft): CombineDraft {
  if (draft.modifiers.length === 0) throw new Error("no modifier to swap with");
  return {
    ...draft,
    head: draft.modifiers[0],
    modifiers: [draft.head, ...draft.modifiers.slice(1)],
  };
}

export async function commitRevision(
  client: ServiceClient,
  state: SessionState,
  alias?: string,
): Promise<SessionState> {
  if (state.activeKbId === null) throw new Error("no knowledge base selected");
  if (state.pinnedScenario === null) throw new Error("pick a surviving scenario first");
  const { kb_id } = await client.revise(
    state.activeKbId,
    state.draft,
    state.pinnedScenario,
    alias,
  );
  return activateKb(client, state, kb_id);
}
