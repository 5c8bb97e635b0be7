// HTML renderers.  Each function returns a markup string from a view
// model, so the whole presentation layer is testable without a DOM.

import type { LogEvent, WhatifEntry } from "./types";
import {
  CellView,
  GridViewModel,
  formatNumber,
} from "./viewmodel";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function rateColor(rate: number | null): string {
  if (rate === null) return "#f4f4f4";
  const clamped = Math.max(0, Math.min(1, rate));
  // white → red ramp over the observed toxicity rate
  const green = Math.round(235 - 160 * clamped);
  const blue = Math.round(235 - 200 * clamped);
  return `rgb(250, ${green}, ${blue})`;
}

function cellHtml(cell: CellView): string {
  const classes = ["cell", `cell-${cell.status}`];
  const raw = cell.rawRate === null ? "—" : formatNumber(cell.rawRate);
  const adjusted =
    cell.adjustedRate === null ? "—" : formatNumber(cell.adjustedRate);
  const body =
    cell.status === "untried"
      ? `<span class="cell-empty">untried</span>`
      : `<span class="cell-counts">${cell.m}/${cell.n}</span>
         <span class="cell-rate">raw ${raw}</span>
         <span class="cell-rate">adj ${adjusted}</span>`;
  return `
    <td class="${classes.join(" ")}"
        style="background:${rateColor(cell.rawRate)}"
        data-dose="${cell.j},${cell.k}">
      ${body}
    </td>`;
}

export function renderGrid(view: GridViewModel): string {
  const header = view.cells[0]
    .map((_, k) => `<th scope="col">B${k + 1}</th>`)
    .join("");
  // render with drug-A level increasing upward
  const rows = [...view.cells]
    .reverse()
    .map(
      (row) => `
      <tr>
        <th scope="row">A${row[0].j + 1}</th>
        ${row.map(cellHtml).join("")}
      </tr>`
    )
    .join("");
  return `
    <table class="dose-grid" aria-label="dose combination grid">
      <thead><tr><th></th>${header}</tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <p class="grid-legend">
      <span class="swatch swatch-current"></span> current dose
      <span class="swatch swatch-eliminated"></span> eliminated
    </p>`;
}

export function renderBanner(view: GridViewModel): string {
  return `
    <div class="banner banner-${view.banner.kind}" role="status">
      ${escapeHtml(view.banner.text)}
    </div>`;
}

export function renderCohortForm(
  view: GridViewModel,
  options: { error?: string; value?: string } = {}
): string {
  if (view.status !== "ongoing") {
    return `<p class="form-closed">Enrollment is closed.</p>`;
  }
  const error = options.error
    ? `<p class="form-error" role="alert">${escapeHtml(options.error)}</p>`
    : "";
  const value = options.value === undefined ? "" : escapeHtml(options.value);
  return `
    <form id="cohort-form" class="cohort-form">
      <label for="dlt-count">
        DLTs in this cohort of ${view.cohortSize} (0–${view.cohortSize})
      </label>
      <input id="dlt-count" name="dlt-count" inputmode="numeric"
             autocomplete="off" value="${value}" />
      <button type="submit">Record cohort</button>
      ${error}
    </form>`;
}

export function renderDrpGauge(view: GridViewModel): string {
  const check = view.lastCheck;
  if (view.variant === "off") {
    return `<p class="gauge-off">Early completion is not enabled for this trial.</p>`;
  }
  if (!check) {
    return `<p class="gauge-empty">No retainment-probability check yet.</p>`;
  }
  const percent = Math.round(check.value * 100);
  const tauPercent = Math.round(view.tau * 100);
  const state = check.halt ? "gauge-halt" : "gauge-continue";
  return `
    <div class="drp-gauge ${state}">
      <div class="gauge-track">
        <div class="gauge-fill" style="width:${percent}%"></div>
        <div class="gauge-threshold" style="left:${tauPercent}%"></div>
      </div>
      <p class="gauge-reading">
        DRP (${escapeHtml(check.variant)}) = ${formatNumber(check.value)}
        vs τ = ${formatNumber(view.tau)} ·
        ${check.remaining} patients remaining ·
        ${check.halt ? "stop enrollment" : "continue enrollment"}
      </p>
    </div>`;
}

export function renderDrpHistory(view: GridViewModel): string {
  if (view.drpHistory.length === 0) return "";
  const items = view.drpHistory
    .map(
      (point) => `
      <li>${point.enrolled} enrolled: ${formatNumber(point.value)}${
        point.halt ? " (≥ τ)" : ""
      }</li>`
    )
    .join("");
  return `<ol class="drp-history">${items}</ol>`;
}

export function renderWhatif(
  entries: WhatifEntry[],
  tau: number
): string {
  const rows = entries
    .map((entry) => {
      const check = entry.check;
      const value = check ? formatNumber(check.value) : "—";
      const verdict = check && check.halt ? "stop" : "continue";
      return `
        <tr class="${check && check.halt ? "whatif-halt" : ""}">
          <td>${entry.dlt_count}</td>
          <td>${value}</td>
          <td>${check ? verdict : "—"}</td>
        </tr>`;
    })
    .join("");
  return `
    <table class="whatif" aria-label="next-cohort what-if">
      <caption>If the next cohort has … DLTs (τ = ${formatNumber(tau)})</caption>
      <thead><tr><th>DLTs</th><th>DRP</th><th>verdict</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

export function renderConflictBanner(): string {
  return `
    <div class="banner banner-conflict" role="alert">
      This trial changed in another session. Your entry was NOT saved.
      <button type="button" id="refresh-trial">Refresh</button>
    </div>`;
}

export function renderNetworkError(message: string): string {
  return `
    <div class="banner banner-error" role="alert">
      ${escapeHtml(message)}
    </div>`;
}

function eventLabel(event: LogEvent): string {
  switch (event.event) {
    case "cohort":
      return `cohort at (${(event.dose as number[]).join(", ")}): ${
        event.dlt_count
      } DLTs (${event.m}/${event.n}, ${event.enrolled} enrolled)`;
    case "decision":
      return `decision: ${event.decision} → (${(event.next as number[]).join(
        ", "
      )})`;
    case "drp":
      return `retainment probability ${formatNumber(event.value as number)} (${
        event.halt ? "≥" : "<"
      } τ)`;
    case "elimination":
      return `eliminated (${(event.dose as number[]).join(", ")}) and ${
        (event.cone as number[][]).length - 1
      } doses above it`;
    case "status":
      return `status: ${event.status}`;
  }
}

export function renderTimeline(log: LogEvent[]): string {
  const items = [...log]
    .reverse()
    .map(
      (event) => `
      <li class="event event-${event.event}">
        <span class="event-seq">#${event.seq}</span>
        ${escapeHtml(eventLabel(event))}
      </li>`
    )
    .join("");
  return `<ol class="timeline" reversed>${items}</ol>`;
}

export function renderMtd(mtd: [number, number] | null): string {
  if (mtd === null) {
    return `<p class="mtd">No maximum tolerated dose can be selected.</p>`;
  }
  return `<p class="mtd">Selected MTD: (A${mtd[0] + 1}, B${mtd[1] + 1})</p>`;
}

export function renderTrial(
  view: GridViewModel,
  options: {
    whatif?: WhatifEntry[];
    mtd?: [number, number] | null;
    formError?: string;
    formValue?: string;
    conflict?: boolean;
    networkError?: string;
  } = {}
): string {
  const sections = [
    options.conflict ? renderConflictBanner() : "",
    options.networkError ? renderNetworkError(options.networkError) : "",
    renderBanner(view),
    `<section class="panel panel-grid">${renderGrid(view)}</section>`,
    `<section class="panel panel-entry">${renderCohortForm(view, {
      error: options.formError,
      value: options.formValue,
    })}</section>`,
    `<section class="panel panel-drp">${renderDrpGauge(view)}${renderDrpHistory(
      view
    )}</section>`,
    options.whatif
      ? `<section class="panel panel-whatif">${renderWhatif(
          options.whatif,
          view.tau
        )}</section>`
      : "",
    options.mtd !== undefined
      ? `<section class="panel panel-mtd">${renderMtd(options.mtd)}</section>`
      : "",
    `<section class="panel panel-timeline">
       <h2>Events</h2>
       ${renderTimeline(view.log)}
     </section>`,
  ];
  return sections.filter(Boolean).join("\n");
}
