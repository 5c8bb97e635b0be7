// Pure view-model construction: turns server documents into the plain
// data the render layer draws.  Every number shown to the user is taken
// verbatim from an API field; the only work done here is selection and
// labelling.

import type {
  CompletionCheck,
  LogEvent,
  RatesDoc,
  TrialDoc,
  TrialStatus,
} from "./types";

export type CellStatus = "current" | "tried" | "untried" | "eliminated";

export interface CellView {
  j: number;
  k: number;
  n: number;
  m: number;
  rawRate: number | null;
  adjustedRate: number | null;
  status: CellStatus;
}

export interface DrpPoint {
  seq: number;
  enrolled: number;
  value: number;
  halt: boolean;
}

export interface GridViewModel {
  revision: number;
  cells: CellView[][];
  banner: BannerView;
  drpHistory: DrpPoint[];
  lastCheck: CompletionCheck | null;
  tau: number;
  enrolled: number;
  plannedN: number;
  cohortSize: number;
  status: TrialStatus;
  variant: string;
  log: LogEvent[];
}

export interface BannerView {
  kind: "ongoing" | "completed-early" | "completed-full" | "terminated-safety";
  text: string;
  drp: number | null;
}

const STATUS_TEXT: Record<TrialStatus, string> = {
  ongoing: "Enrollment ongoing",
  "completed-early": "Early completion",
  "completed-full": "Completed at planned sample size",
  "terminated-safety": "Terminated for safety",
};

export function formatNumber(x: number): string {
  // Display contract: at least three decimals, no further rounding of
  // server values beyond formatting.
  return x.toFixed(3);
}

export function validateDltCount(
  raw: string,
  cohortSize: number
): { ok: true; value: number } | { ok: false; message: string } {
  if (!/^\d+$/.test(raw.trim())) {
    return { ok: false, message: "Enter a whole number of DLTs." };
  }
  const value = Number(raw.trim());
  if (value > cohortSize) {
    return {
      ok: false,
      message: `DLT count cannot exceed the cohort size (${cohortSize}).`,
    };
  }
  return { ok: true, value };
}

export function drpHistory(log: LogEvent[]): DrpPoint[] {
  const points: DrpPoint[] = [];
  let enrolled = 0;
  for (const event of log) {
    if (event.event === "cohort") enrolled = event.enrolled as number;
    if (event.event === "drp") {
      points.push({
        seq: event.seq,
        enrolled,
        value: event.value as number,
        halt: event.halt as boolean,
      });
    }
  }
  return points;
}

export function lastCompletionCheck(log: LogEvent[]): CompletionCheck | null {
  for (let i = log.length - 1; i >= 0; i--) {
    const event = log[i];
    if (event.event === "drp") {
      return {
        variant: event.variant,
        m_eff: event.m_eff,
        remaining: event.remaining,
        boundary: event.boundary,
        value: event.value,
        halt: event.halt,
      } as CompletionCheck;
    }
  }
  return null;
}

export function decisionSequence(log: LogEvent[]): string[] {
  return log
    .filter((event) => event.event === "decision")
    .map((event) => String(event.decision));
}

function buildBanner(doc: TrialDoc, check: CompletionCheck | null): BannerView {
  const status = doc.state.status;
  let text = STATUS_TEXT[status];
  let drp: number | null = null;
  if (status === "completed-early" && check) {
    drp = check.value;
    text = `Early completion: retainment probability ${formatNumber(
      check.value
    )} ≥ τ = ${formatNumber(doc.config.tau)} with ${check.remaining} patients remaining`;
  } else if (status === "ongoing") {
    text = `${STATUS_TEXT[status]} — ${doc.state.enrolled} of ${doc.config.N} patients`;
  }
  return { kind: status, text, drp };
}

export function buildGridView(doc: TrialDoc, rates: RatesDoc): GridViewModel {
  const { J, K } = doc.state.grid;
  const eliminated = new Set(doc.state.eliminated.map(([j, k]) => `${j},${k}`));
  const [cj, ck] = doc.state.current;
  const cells: CellView[][] = [];
  for (let j = 0; j < J; j++) {
    const row: CellView[] = [];
    for (let k = 0; k < K; k++) {
      const n = doc.state.n[j][k];
      let status: CellStatus = n > 0 ? "tried" : "untried";
      if (eliminated.has(`${j},${k}`)) status = "eliminated";
      if (j === cj && k === ck && doc.state.status === "ongoing") {
        status = "current";
      }
      row.push({
        j,
        k,
        n,
        m: doc.state.m[j][k],
        rawRate: rates.raw[j][k],
        adjustedRate: rates.adjusted[j][k],
        status,
      });
    }
    cells.push(row);
  }
  const check = lastCompletionCheck(doc.state.log);
  return {
    revision: doc.revision,
    cells,
    banner: buildBanner(doc, check),
    drpHistory: drpHistory(doc.state.log),
    lastCheck: check,
    tau: doc.config.tau,
    enrolled: doc.state.enrolled,
    plannedN: doc.config.N,
    cohortSize: doc.config.cohort_size,
    status: doc.state.status,
    variant: doc.config.variant,
    log: doc.state.log,
  };
}
