// Pure HTML-string rendering of combine results. No arithmetic happens here
// beyond percent formatting: probabilities and statuses are displayed exactly
// as the service returned them.

import type { CombineResult, Rational, ScenarioRow, WorkspaceEntry } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Percent with three decimal places, e.g. 7.056%. */
export function formatPercent(p: Rational): string {
  return `${((p.num / p.den) * 100).toFixed(3)}%`;
}

const STATUS_LABELS: Record<ScenarioRow["status"], string> = {
  inconsistent: "inconsistent",
  trivial: "trivial",
  modifier_preferred: "modifier preferred",
  dominated: "dominated",
  selected: "selected",
};

function checkMarks(bits: string): string {
  return [...bits]
    .map((bit, i) =>
      bit === "1"
        ? `<td class="kept" title="inclusion ${i + 1} kept">&#10003;</td>`
        : `<td class="dropped" title="inclusion ${i + 1} dropped">&#10007;</td>`,
    )
    .join("");
}

export function scenarioTable(result: CombineResult): string {
  if (result.scenarios.length === 0) {
    return `<div class="banner">no admissible scenario</div>`;
  }
  const width = result.scenarios[0].bits.length;
  const inclusionHeaders = Array.from(
    { length: width },
    (_, i) => `<th class="incl">${i + 1}</th>`,
  ).join("");
  const rows = result.scenarios
    .map((row) => {
      const survivor = result.selected.includes(row.bits);
      const classes = [`status-${row.status}`, `block-${row.block % 2}`];
      if (survivor) classes.push("survivor");
      return `<tr class="${classes.join(" ")}" data-bits="${row.bits}" data-block="${row.block}">
        <td class="bits">${row.bits}</td>${checkMarks(row.bits)}
        <td class="prob">${formatPercent(row.probability)}</td>
        <td class="status">${STATUS_LABELS[row.status]}${survivor ? " &#9733;" : ""}</td>
      </tr>`;
    })
    .join("\n");
  return `<table class="scenarios">
    <caption>scenarios for ${escapeHtml(result.compound)}</caption>
    <thead><tr><th>scenario</th>${inclusionHeaders}<th>probability</th><th>status</th></tr></thead>
    <tbody>
${rows}
    </tbody>
  </table>`;
}

export function lineageList(lineage: WorkspaceEntry[], activeId: string): string {
  const items = lineage
    .map((entry) => {
      const active = entry.kb_id === activeId ? ' class="active"' : "";
      return `<li${active} data-kb-id="${entry.kb_id}">${escapeHtml(entry.name)} <code>${entry.kb_id}</code></li>`;
    })
    .join("\n");
  return `<ol class="lineage">\n${items}\n</ol>`;
}

export function errorBanner(message: string): string {
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}
