import { afterEach, describe, expect, it, vi } from "vitest";

import { RaterQueue } from "../src/queue";
import { FakeServer, sixItems } from "./fake_server";

afterEach(() => vi.unstubAllGlobals());

function serverWithQueue(rater = "r1") {
  const items = sixItems();
  const server = new FakeServer(items, {
    [rater]: items.map((i) => i.sample_id),
  });
  vi.stubGlobal("fetch", server.fetch);
  return { server, queue: new RaterQueue("", "s", rater) };
}

function scoreAll(queue: RaterQueue, scores = [5, 4, 4, 3]) {
  queue.setScore("simplicity", scores[0]);
  queue.setScore("accuracy", scores[1]);
  queue.setScore("completeness", scores[2]);
  queue.setScore("brevity", scores[3]);
}

describe("RaterQueue", () => {
  it("loads the first item with zero progress", async () => {
    const { queue } = serverWithQueue();
    await queue.load();
    expect(queue.status).toBe("rating");
    expect(queue.current?.sample_id).toBe("item-0");
    expect(queue.progress).toEqual({ done: 0, total: 6 });
  });

  it("cannot submit until all four criteria are scored", async () => {
    const { queue } = serverWithQueue();
    await queue.load();
    queue.setScore("simplicity", 5);
    queue.setScore("accuracy", 4);
    queue.setScore("completeness", 4);
    expect(queue.canSubmit()).toBe(false);
    await expect(queue.submit()).rejects.toThrow();
    queue.setScore("brevity", 3);
    expect(queue.canSubmit()).toBe(true);
  });

  it("rejects out-of-range scores", async () => {
    const { queue } = serverWithQueue();
    await queue.load();
    expect(() => queue.setScore("simplicity", 6)).toThrow(RangeError);
    expect(() => queue.setScore("simplicity", 0)).toThrow(RangeError);
  });

  it("advances and clears the draft after acknowledgment", async () => {
    const { server, queue } = serverWithQueue();
    await queue.load();
    scoreAll(queue);
    await queue.submit();
    expect(server.ratings.size).toBe(1);
    expect(queue.current?.sample_id).toBe("item-1");
    expect(queue.draft).toEqual({});
    expect(queue.progress.done).toBe(1);
  });

  it("skips forward on a 409 conflict", async () => {
    const { server, queue } = serverWithQueue();
    await queue.load();
    server.ratings.set("item-0 r1", {
      simplicity: 3, accuracy: 3, completeness: 3, brevity: 3,
    });
    scoreAll(queue);
    await queue.submit();
    expect(queue.status).toBe("rating");
    expect(queue.current?.sample_id).toBe("item-1");
  });

  it("keeps the draft when the network fails", async () => {
    const { queue } = serverWithQueue();
    await queue.load();
    scoreAll(queue);
    vi.stubGlobal("fetch", async () => {
      throw new Error("network down");
    });
    await expect(queue.submit()).rejects.toThrow("network down");
    expect(queue.status).toBe("error");
    expect(queue.draft).toEqual({ simplicity: 5, accuracy: 4, completeness: 4, brevity: 3 });
  });

  it("reaches the done screen after the last item", async () => {
    const { queue } = serverWithQueue();
    await queue.load();
    for (let i = 0; i < 6; i++) {
      scoreAll(queue);
      await queue.submit();
    }
    expect(queue.status).toBe("done");
    expect(queue.current).toBeNull();
    expect(queue.progress).toEqual({ done: 6, total: 6 });
  });
});
