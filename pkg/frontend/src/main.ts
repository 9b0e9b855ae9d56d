// Browser bootstrap: wires the DOM to the service client and the workflow
// state machine. Every state change round-trips to the server.

import { ApiError, ServiceClient } from "./api.js";
import { errorBanner, lineageList, scenarioTable } from "./render.js";
import {
  activateKb, commitRevision, initialState, pinScenario, runCombine,
  swappedDraft, SessionState,
} from "./workflow.js";

const client = new ServiceClient("");
let state: SessionState = initialState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setBusy(busy: boolean): void {
  document.body.classList.toggle("busy", busy);
  document.querySelectorAll("button").forEach((b) => (b.disabled = busy));
}

async function guard(action: () => Promise<void>): Promise<void> {
  setBusy(true);
  el("error").innerHTML = "";
  try {
    await action();
  } catch (error) {
    const message = error instanceof ApiError ? error.message : String(error);
    el("error").innerHTML = errorBanner(message);
  } finally {
    setBusy(false);
  }
}

async function refreshKbList(): Promise<void> {
  const { kbs } = await client.listKbs();
  const select = el<HTMLSelectElement>("kb-select");
  select.innerHTML = kbs
    .map((e) => `<option value="${e.kb_id}">${e.name} (${e.kb_id})</option>`)
    .join("");
  if (state.activeKbId) select.value = state.activeKbId;
}

function renderSession(): void {
  el("lineage").innerHTML = state.activeKbId
    ? lineageList(state.lineage, state.activeKbId)
    : "";
  el("table").innerHTML = state.lastResult ? scenarioTable(state.lastResult) : "";
  el<HTMLButtonElement>("revise").disabled = state.pinnedScenario === null;
  for (const row of el("table").querySelectorAll("tr.survivor")) {
    row.addEventListener("click", () => {
      state = pinScenario(state, (row as HTMLElement).dataset.bits ?? "");
      for (const other of el("table").querySelectorAll("tr.pinned")) {
        other.classList.remove("pinned");
      }
      row.classList.add("pinned");
      el<HTMLButtonElement>("revise").disabled = false;
    });
  }
}

function currentDraft() {
  const k = el<HTMLInputElement>("exactly-k").value;
  return {
    head: el<HTMLInputElement>("head").value.trim(),
    modifiers: el<HTMLInputElement>("modifiers")
      .value.split(",")
      .map((m) => m.trim())
      .filter((m) => m.length > 0),
    exactly_k: k ? Number(k) : null,
    include_all: true,
  };
}

function wire(): void {
  el("upload").addEventListener("click", () =>
    guard(async () => {
      const name = el<HTMLInputElement>("kb-name").value.trim() || "untitled";
      const { kb_id } = await client.uploadKb(name, el<HTMLTextAreaElement>("kb-source").value);
      state = await activateKb(client, state, kb_id);
      await refreshKbList();
      renderSession();
    }),
  );
  el("kb-select").addEventListener("change", () =>
    guard(async () => {
      state = await activateKb(client, state, el<HTMLSelectElement>("kb-select").value);
      const { source } = await client.getKb(state.activeKbId!);
      el<HTMLTextAreaElement>("kb-source").value = source;
      renderSession();
    }),
  );
  el("combine").addEventListener("click", () =>
    guard(async () => {
      state = await runCombine(client, state, currentDraft());
      renderSession();
    }),
  );
  el("swap").addEventListener("click", () =>
    guard(async () => {
      const draft = swappedDraft(currentDraft());
      el<HTMLInputElement>("head").value = draft.head;
      el<HTMLInputElement>("modifiers").value = draft.modifiers.join(", ");
      state = await runCombine(client, state, draft);
      renderSession();
    }),
  );
  el("revise").addEventListener("click", () =>
    guard(async () => {
      const alias = el<HTMLInputElement>("alias").value.trim() || undefined;
      state = await commitRevision(client, state, alias);
      const { source } = await client.getKb(state.activeKbId!);
      el<HTMLTextAreaElement>("kb-source").value = source;
      await refreshKbList();
      renderSession();
    }),
  );
  guard(refreshKbList);
}

document.addEventListener("DOMContentLoaded", wire);
