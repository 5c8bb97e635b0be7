import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, RevisionConflictError } from "../src/api";
import fixture from "./fixtures/example_conduct.json";

interface RecordedCall {
  url: string;
  method?: string;
  body?: string;
}

function stubFetch(status: number, payload: unknown, calls: RecordedCall[]) {
  return async (url: string, init?: { method?: string; body?: string }) => {
    calls.push({ url, method: init?.method, body: init?.body });
    return { status, json: async () => payload };
  };
}

describe("ApiClient", () => {
  it("posts cohorts with the revision guard", async () => {
    const calls: RecordedCall[] = [];
    const api = new ApiClient(
      "http://svc",
      stubFetch(200, fixture.steps[0].response, calls)
    );
    const response = await api.postCohort("abc", 0, 0);
    expect(calls[0].url).toBe("http://svc/trials/abc/cohorts");
    expect(calls[0].method).toBe("POST");
    expect(JSON.parse(calls[0].body!)).toEqual({ dlt_count: 0, revision: 0 });
    expect(response.decision).toBe("escalate");
  });

  it("maps 409 responses to RevisionConflictError", async () => {
    const api = new ApiClient(
      "",
      stubFetch(fixture.conflict_409.status, fixture.conflict_409.body, [])
    );
    await expect(api.postCohort("abc", 0, 0)).rejects.toBeInstanceOf(
      RevisionConflictError
    );
  });

  it("maps other error statuses to ApiError with the server detail", async () => {
    const api = new ApiClient(
      "",
      stubFetch(fixture.overflow_422.status, fixture.overflow_422.body, [])
    );
    const failure = api.postCohort("abc", 4, 0);
    await expect(failure).rejects.toBeInstanceOf(ApiError);
    await expect(failure).rejects.toMatchObject({
      status: 422,
      detail: expect.stringContaining("cohort"),
    });
  });

  it("fetches rates, what-if, and MTD from their endpoints", async () => {
    const calls: RecordedCall[] = [];
    const api = new ApiClient("", stubFetch(200, fixture.mtd, calls));
    await api.getRates("abc");
    await api.getWhatif("abc");
    await api.getMtd("abc");
    expect(calls.map((c) => c.url)).toEqual([
      "/trials/abc/rates",
      "/trials/abc/whatif",
      "/trials/abc/mtd",
    ]);
  });
});
