import { afterEach, describe, expect, it, vi } from "vitest";

import {
  ApiError,
  BlindingViolationError,
  ConflictError,
  assertBlinded,
  fetchNext,
  submitRating,
} from "../src/api";

const ITEM = { sample_id: "item-0", source: "src", adaptation: "plain" };

afterEach(() => vi.unstubAllGlobals());

function respond(status: number, body: unknown) {
  vi.stubGlobal("fetch", async () => new Response(JSON.stringify(body), { status }));
}

describe("assertBlinded", () => {
  it("accepts the three blinded fields", () => {
    expect(assertBlinded({ ...ITEM })).toEqual(ITEM);
  });

  it("refuses an approach field", () => {
    expect(() => assertBlinded({ ...ITEM, approach: "two_agents" })).toThrow(
      BlindingViolationError,
    );
  });

  it("refuses a model field", () => {
    expect(() => assertBlinded({ ...ITEM, model_id: "m1" })).toThrow(
      BlindingViolationError,
    );
  });
});

describe("fetchNext", () => {
  it("returns the item and progress", async () => {
    respond(200, { item: ITEM, progress: { done: 0, total: 6 } });
    const payload = await fetchNext("", "s", "r1");
    expect(payload.item).toEqual(ITEM);
    expect(payload.progress).toEqual({ done: 0, total: 6 });
  });

  it("passes the done marker through", async () => {
    respond(200, { item: null, progress: { done: 6, total: 6 } });
    expect((await fetchNext("", "s", "r1")).item).toBeNull();
  });

  it("refuses to render a leaked payload", async () => {
    respond(200, {
      item: { ...ITEM, approach: "baseline" },
      progress: { done: 0, total: 6 },
    });
    await expect(fetchNext("", "s", "r1")).rejects.toThrow(BlindingViolationError);
  });

  it("surfaces http errors with status", async () => {
    respond(404, { detail: "unknown session" });
    await expect(fetchNext("", "s", "r1")).rejects.toMatchObject({ status: 404 });
  });
});

describe("submitRating", () => {
  const scores = { simplicity: 5, accuracy: 4, completeness: 4, brevity: 3 };

  it("posts all four criteria", async () => {
    let sent: any;
    vi.stubGlobal("fetch", async (_url: string, init: RequestInit) => {
      sent = JSON.parse(String(init.body));
      return new Response("{}", { status: 200 });
    });
    await submitRating("", "s", "r1", "item-0", scores);
    expect(sent).toEqual({ sample_id: "item-0", rater_id: "r1", ...scores });
  });

  it("maps 409 to ConflictError", async () => {
    respond(409, { detail: "already rated" });
    await expect(submitRating("", "s", "r1", "item-0", scores)).rejects.toThrow(
      ConflictError,
    );
  });

  it("maps 422 to ApiError", async () => {
    respond(422, { detail: "score out of range" });
    await expect(submitRating("", "s", "r1", "item-0", scores)).rejects.toThrow(
      ApiError,
    );
  });
});
