import { describe, expect, it } from "vitest";

import { PendingQueue } from "../src/offline.js";
import type { PendingDecision } from "../src/offline.js";

function decision(id: string, label: "yes" | "no" | "?" = "yes"): PendingDecision {
  return { sentenceId: id, label, clientTimestamp: "t" };
}

describe("PendingQueue", () => {
  it("a newer decision for the same sentence supersedes", () => {
    const queue = new PendingQueue();
    queue.add(decision("s1", "yes"));
    queue.add(decision("s2", "no"));
    queue.add(decision("s1", "?"));
    expect(queue.size).toBe(2);
    expect(queue.list().map((d) => [d.sentenceId, d.label])).toEqual([
      ["s2", "no"],
      ["s1", "?"],
    ]);
  });

  it("flushes in order and stops at the first failure", async () => {
    const queue = new PendingQueue();
    queue.add(decision("s1"));
    queue.add(decision("s2"));
    queue.add(decision("s3"));
    const sent: string[] = [];
    const acked = await queue.flush(async (d) => {
      if (d.sentenceId === "s2") throw new Error("offline again");
      sent.push(d.sentenceId);
    });
    expect(sent).toEqual(["s1"]);
    expect(acked.map((d) => d.sentenceId)).toEqual(["s1"]);
    expect(queue.list().map((d) => d.sentenceId)).toEqual(["s2", "s3"]);
  });

  it("a clean flush empties the queue", async () => {
    const queue = new PendingQueue();
    queue.add(decision("s1"));
    queue.add(decision("s2"));
    const acked = await queue.flush(async () => undefined);
    expect(acked.length).toBe(2);
    expect(queue.size).toBe(0);
  });
});
