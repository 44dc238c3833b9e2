// Decisions that could not reach the service are retained here and
// replayed on reconnect. One pending decision per sentence: a newer
// decision for the same sentence supersedes the queued one.

import type { Decision } from "./types.js";

export interface PendingDecision {
  sentenceId: string;
  label: Decision;
  clientTimestamp: string;
}

export class PendingQueue {
  private items: PendingDecision[] = [];

  get size(): number {
    return this.items.length;
  }

  list(): readonly PendingDecision[] {
    return this.items;
  }

  add(decision: PendingDecision): void {
    this.items = this.items.filter((d) => d.sentenceId !== decision.sentenceId);
    this.items.push(decision);
  }

  /** Replay queued decisions in order; stops at the first failure so
   * nothing is dropped. Returns the decisions that were acknowledged. */
  async flush(
    submit: (decision: PendingDecision) => Promise<void>,
  ): Promise<PendingDecision[]> {
    const acked: PendingDecision[] = [];
    while (this.items.length > 0) {
      const next = this.items[0];
      try {
        await submit(next);
      } catch {
        break;
      }
      acked.push(next);
      this.items.shift();
    }
    return acked;
  }
}
