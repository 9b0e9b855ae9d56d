// End-to-end invention loop against a live service instance: upload a KB,
// combine hero+villain, commit the AntiHero revision, build the chimera on
// the child, and recombine the two inventions — a lineage of length three.

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import {
  activateKb, commitRevision, initialState, pinScenario, runCombine,
  swappedDraft,
} from "../src/workflow.js";

const PORT = 7490 + Math.floor(Math.random() * 400);
const BASE = `http://127.0.0.1:${PORT}`;
const CORPUS = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "corpus");

let service: ChildProcess;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/api/kbs`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("service did not start");
}

beforeAll(async () => {
  const workspace = mkdtempSync(join(tmpdir(), "tclogic-ws-"));
  service = spawn(
    "python3",
    ["-m", "tclogic.service", "--port", String(PORT), "--workspace", workspace],
    { stdio: "ignore" },
  );
  await waitForService();
}, 30_000);

afterAll(() => {
  service?.kill();
});

describe("invention workflow against the live service", () => {
  it("chains hero+villain -> AntiHero -> Chimera and recombines them", async () => {
    const client = new ServiceClient(BASE);
    const source =
      readFileSync(join(CORPUS, "hero_villain.tcl"), "utf8") +
      "\n" +
      readFileSync(join(CORPUS, "chimera.tcl"), "utf8");
    const { kb_id } = await client.uploadKb("characters", source);

    let state = await activateKb(client, initialState(), kb_id);
    expect(state.lineage).toHaveLength(1);

    // combine Villain (head) with Hero; the surviving block has two scenarios
    state = await runCombine(client, state, {
      head: "Villain",
      modifiers: ["Hero"],
    });
    expect(state.lastResult!.selected).toEqual(["1000110", "1000011"]);
    expect(state.lastResult!.compound).toBe("Villain and Hero");

    // picking a non-surviving scenario is rejected client-side
    expect(() => pinScenario(state, "1111111")).toThrow("not in the surviving block");

    state = pinScenario(state, "1000110");
    state = await commitRevision(client, state, "AntiHero");
    expect(state.lineage.map((e) => e.name)).toEqual(["characters", "AntiHero"]);

    // build the chimera on the child KB
    state = await runCombine(client, state, {
      head: "Lion",
      modifiers: ["Goat", "Dragon"],
    });
    expect(state.lastResult!.selected).toHaveLength(1);
    state = pinScenario(state, state.lastResult!.selected[0]);
    state = await commitRevision(client, state, "Chimera");
    expect(state.lineage.map((e) => e.name)).toEqual([
      "characters",
      "AntiHero",
      "Chimera",
    ]);
    expect(state.lineage).toHaveLength(3);

    // the two inventions now combine through their alias atoms
    state = await runCombine(client, state, {
      head: "Chimera",
      modifiers: ["AntiHero"],
    });
    expect(state.lastResult!.selected).toHaveLength(2);
    const survivors = state.lastResult!.scenarios.filter(
      (s) => s.status === "selected",
    );
    for (const s of survivors) {
      expect(s.probability).toEqual({ num: 3365793, den: 62500000 });
    }
  }, 30_000);

  it("swap toggle reverses head and modifier roles", async () => {
    const draft = swappedDraft({ head: "Chimera", modifiers: ["AntiHero"] });
    expect(draft).toEqual({ head: "AntiHero", modifiers: ["Chimera"] });
  });

  it("surfaces server rejections", async () => {
    const client = new ServiceClient(BASE);
    await expect(client.getKb("000000000000")).rejects.toThrow("404");
  });
});
