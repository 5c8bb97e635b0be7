// Wire types mirroring the combodose HTTP JSON API.  All numeric values
// here are produced by the server; the console never computes design
// quantities itself.

export type DesignKind = "boin" | "keyboard";
export type CompletionVariantName = "off" | "drp" | "drp_i";
export type TrialStatus =
  | "ongoing"
  | "completed-full"
  | "completed-early"
  | "terminated-safety";

export interface TrialConfig {
  design: DesignKind;
  phi: number;
  phi1: number | null;
  phi2: number | null;
  variant: CompletionVariantName;
  tau: number;
  runtime_smoothing: boolean;
  N: number;
  cohort_size: number;
  J: number;
  K: number;
  seed: number;
}

export interface LogEvent {
  seq: number;
  event: "cohort" | "elimination" | "decision" | "drp" | "status";
  [key: string]: unknown;
}

export interface TrialStateDoc {
  schema_version: number;
  grid: { J: number; K: number };
  n: number[][];
  m: number[][];
  current: [number, number];
  eliminated: [number, number][];
  enrolled: number;
  status: TrialStatus;
  log: LogEvent[];
}

export interface TrialDoc {
  schema_version: number;
  id: string;
  revision: number;
  config: TrialConfig;
  state: TrialStateDoc;
}

export interface CompletionCheck {
  variant: CompletionVariantName;
  m_eff: number;
  remaining: number;
  boundary: string;
  value: number;
  halt: boolean;
}

export interface CohortResponse extends TrialDoc {
  decision: string | null;
  next_dose: [number, number];
  drp: number | null;
  drp_variant: CompletionVariantName | null;
  events: LogEvent[];
}

export interface RatesDoc {
  schema_version: number;
  id: string;
  revision: number;
  raw: (number | null)[][];
  adjusted: (number | null)[][];
}

export interface MtdDoc {
  schema_version: number;
  id: string;
  mtd: [number, number] | null;
}

export interface WhatifEntry {
  dlt_count: number;
  check: CompletionCheck | null;
}

export interface WhatifDoc {
  schema_version: number;
  id: string;
  whatif: WhatifEntry[];
}
