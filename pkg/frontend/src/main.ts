// Browser entry point: wires the API client, view model, and renderers
// to the document.  All math lives on the server; this file only moves
// JSON into markup and form input into requests.

import { ApiClient, ApiError, RevisionConflictError } from "./api";
import { renderTrial } from "./render";
import { buildGridView, validateDltCount } from "./viewmodel";
import type { TrialDoc, WhatifEntry } from "./types";

// Same-origin by default; set window.COMBODOSE_API to point the console
// at a service running elsewhere.
const baseUrl =
  (globalThis as { COMBODOSE_API?: string }).COMBODOSE_API ?? "";
const api = new ApiClient(baseUrl, (input, init) => fetch(input, init));

interface SessionState {
  doc: TrialDoc;
  whatif: WhatifEntry[] | null;
  mtd: [number, number] | null | undefined;
  formError?: string;
  formValue?: string;
  conflict: boolean;
  networkError?: string;
}

let session: SessionState | null = null;

function root(): HTMLElement {
  const el = document.getElementById("app");
  if (!el) throw new Error("missing #app root element");
  return el;
}

async function refreshDerived(doc: TrialDoc): Promise<SessionState> {
  const ongoing = doc.state.status === "ongoing";
  const whatif =
    ongoing && doc.config.variant !== "off"
      ? (await api.getWhatif(doc.id)).whatif
      : null;
  const mtd = ongoing ? undefined : (await api.getMtd(doc.id)).mtd;
  return { doc, whatif, mtd, conflict: false };
}

async function renderSession(state: SessionState): Promise<void> {
  const rates = await api.getRates(state.doc.id);
  const view = buildGridView(state.doc, rates);
  root().innerHTML = `
    <header class="masthead">
      <h1>Trial ${state.doc.id}</h1>
      <p class="config-line">
        ${state.doc.config.design} · φ = ${state.doc.config.phi} ·
        variant ${state.doc.config.variant} ·
        N = ${state.doc.config.N} · cohort ${state.doc.config.cohort_size}
      </p>
    </header>
    ${renderTrial(view, {
      whatif: state.whatif ?? undefined,
      mtd: state.mtd,
      formError: state.formError,
      formValue: state.formValue,
      conflict: state.conflict,
      networkError: state.networkError,
    })}`;
  wireHandlers(state);
}

function wireHandlers(state: SessionState): void {
  const form = document.getElementById("cohort-form");
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = document.getElementById("dlt-count") as HTMLInputElement;
    void submitCohort(state, input.value);
  });
  const refresh = document.getElementById("refresh-trial");
  refresh?.addEventListener("click", () => void reloadTrial(state.doc.id));
}

async function submitCohort(state: SessionState, raw: string): Promise<void> {
  const checked = validateDltCount(raw, state.doc.config.cohort_size);
  if (!checked.ok) {
    await renderSession({ ...state, formError: checked.message, formValue: raw });
    return;
  }
  try {
    const response = await api.postCohort(
      state.doc.id,
      checked.value,
      state.doc.revision
    );
    session = await refreshDerived(response);
    await renderSession(session);
  } catch (error) {
    if (error instanceof RevisionConflictError) {
      await renderSession({ ...state, conflict: true, formValue: raw });
    } else if (error instanceof ApiError) {
      await renderSession({ ...state, formError: error.detail, formValue: raw });
    } else {
      await renderSession({
        ...state,
        networkError: "Could not reach the trial service. Your entry was not saved.",
        formValue: raw,
      });
    }
  }
}

async function reloadTrial(trialId: string): Promise<void> {
  const doc = await api.getTrial(trialId);
  session = await refreshDerived(doc);
  await renderSession(session);
}

function renderLanding(): void {
  root().innerHTML = `
    <header class="masthead"><h1>Combination trial conduct</h1></header>
    <section class="panel">
      <form id="create-form" class="create-form">
        <fieldset>
          <legend>New trial</legend>
          <label>Design
            <select name="design">
              <option value="boin">BOIN</option>
              <option value="keyboard">Keyboard</option>
            </select>
          </label>
          <label>Target rate φ <input name="phi" value="0.3" /></label>
          <label>Early completion
            <select name="variant">
              <option value="drp">predictive (drp)</option>
              <option value="drp_i">isotonic-adjusted (drp_i)</option>
              <option value="off">off</option>
            </select>
          </label>
          <label>Threshold τ <input name="tau" value="0.4" /></label>
          <label>Planned N <input name="N" value="30" /></label>
          <label>Cohort size <input name="cohort_size" value="3" /></label>
          <label>Drug A levels <input name="J" value="3" /></label>
          <label>Drug B levels <input name="K" value="3" /></label>
          <label>Seed <input name="seed" value="0" /></label>
        </fieldset>
        <button type="submit">Create trial</button>
      </form>
      <form id="open-form" class="open-form">
        <label>Open existing trial <input name="trial-id" placeholder="trial id" /></label>
        <button type="submit">Open</button>
      </form>
      <p id="landing-error" class="form-error" role="alert"></p>
    </section>`;

  document.getElementById("create-form")?.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(event.target as HTMLFormElement);
    void (async () => {
      try {
        const doc = await api.createTrial({
          design: data.get("design") as "boin" | "keyboard",
          phi: Number(data.get("phi")),
          variant: data.get("variant") as "off" | "drp" | "drp_i",
          tau: Number(data.get("tau")),
          N: Number(data.get("N")),
          cohort_size: Number(data.get("cohort_size")),
          J: Number(data.get("J")),
          K: Number(data.get("K")),
          seed: Number(data.get("seed")),
        });
        session = await refreshDerived(doc);
        await renderSession(session);
      } catch (error) {
        const el = document.getElementById("landing-error");
        if (el) el.textContent = error instanceof ApiError ? error.detail : String(error);
      }
    })();
  });

  document.getElementById("open-form")?.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(event.target as HTMLFormElement);
    void (async () => {
      try {
        await reloadTrial(String(data.get("trial-id") ?? "").trim());
      } catch (error) {
        const el = document.getElementById("landing-error");
        if (el) el.textContent = error instanceof ApiError ? error.detail : String(error);
      }
    })();
  });
}

renderLanding();
