// Thin typed client for the combodose service.  The fetch function is
// injectable so tests can drive the client from recorded responses.

import type {
  CohortResponse,
  MtdDoc,
  RatesDoc,
  TrialConfig,
  TrialDoc,
  WhatifDoc,
} from "./types";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string }
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export class RevisionConflictError extends ApiError {
  constructor(detail: string) {
    super(409, detail);
    this.name = "RevisionConflictError";
  }
}

async function raiseFor(status: number, body: unknown): Promise<never> {
  const detail =
    body && typeof body === "object" && "detail" in body
      ? String((body as { detail: unknown }).detail)
      : "request failed";
  if (status === 409) throw new RevisionConflictError(detail);
  throw new ApiError(status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown
  ): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (response.status >= 400) await raiseFor(response.status, payload);
    return payload as T;
  }

  createTrial(config: Partial<TrialConfig>): Promise<TrialDoc> {
    return this.request("POST", "/trials", config);
  }

  getTrial(trialId: string): Promise<TrialDoc> {
    return this.request("GET", `/trials/${trialId}`);
  }

  postCohort(
    trialId: string,
    dltCount: number,
    revision: number
  ): Promise<CohortResponse> {
    return this.request("POST", `/trials/${trialId}/cohorts`, {
      dlt_count: dltCount,
      revision,
    });
  }

  getRates(trialId: string): Promise<RatesDoc> {
    return this.request("GET", `/trials/${trialId}/rates`);
  }

  getMtd(trialId: string): Promise<MtdDoc> {
    return this.request("GET", `/trials/${trialId}/mtd`);
  }

  getWhatif(trialId: string): Promise<WhatifDoc> {
    return this.request("GET", `/trials/${trialId}/whatif`);
  }
}
