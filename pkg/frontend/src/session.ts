// Workbench session state machine: one active item at a time, decisions
// require an active item, and the cursor advances only on server
// acknowledgment. Failed submissions are retained and replayed.

import type { ApiClient } from "./api.js";
import { PendingQueue } from "./offline.js";
import type { Decision, QueueItem } from "./types.js";
import { isDecision } from "./types.js";

export type SubmitOutcome = "acked" | "queued" | "duplicate";

export class WorkbenchSession {
  items: QueueItem[] = [];
  cursor = 0;
  readonly pending = new PendingQueue();
  private acked = new Set<string>();
  private inFlight: string | null = null;
  private itemStartedAt: number | null = null;

  constructor(
    private readonly api: ApiClient,
    readonly queueKind: "annotate" | "triage",
    private readonly now: () => number = () => Date.now(),
  ) {}

  get activeItem(): QueueItem | null {
    return this.cursor < this.items.length ? this.items[this.cursor] : null;
  }

  get progress(): { done: number; total: number } {
    return { done: Math.min(this.cursor, this.items.length), total: this.items.length };
  }

  /** Items are kept exactly in service order; the UI never reorders. */
  async loadQueue(limit = 20): Promise<void> {
    const envelope = await this.api.getQueue(this.queueKind, limit);
    this.items = envelope.data.items;
    this.cursor = 0;
    this.itemStartedAt = this.items.length > 0 ? this.now() : null;
  }

  timerElapsedSeconds(): number {
    if (this.itemStartedAt === null) return 0;
    return (this.now() - this.itemStartedAt) / 1000;
  }

  /** Soft 30-second hint: suggests answering "?", never enforced. */
  timerHintDue(): boolean {
    const item = this.activeItem;
    if (item === null) return false;
    return this.timerElapsedSeconds() >= item.soft_timer_seconds;
  }

  decisionForKey(key: string): Decision | null {
    const mapping: Record<string, Decision> = { y: "yes", n: "no", "?": "?" };
    return mapping[key.toLowerCase()] ?? null;
  }

  async submit(label: Decision): Promise<SubmitOutcome> {
    const item = this.activeItem;
    if (item === null) {
      throw new Error("no active item to decide on");
    }
    if (!isDecision(label)) {
      throw new Error(`not a submittable label: ${String(label)}`);
    }
    if (this.inFlight === item.sentence_id) {
      return "duplicate";
    }
    const timestamp = new Date(this.now()).toISOString();
    this.inFlight = item.sentence_id;
    try {
      await this.api.submitLabel(item.sentence_id, label, timestamp);
    } catch {
      this.pending.add({
        sentenceId: item.sentence_id,
        label,
        clientTimestamp: timestamp,
      });
      return "queued";
    } finally {
      this.inFlight = null;
    }
    return this.acknowledge(item.sentence_id) ? "acked" : "duplicate";
  }

  /** Replay retained decisions (e.g. on reconnect). Acknowledged ones
   * advance the cursor if they belong to the active item. */
  async retryPending(): Promise<number> {
    const acked = await this.pending.flush((decision) =>
      this.api
        .submitLabel(decision.sentenceId, decision.label, decision.clientTimestamp)
        .then(() => undefined),
    );
    for (const decision of acked) {
      this.acknowledge(decision.sentenceId);
    }
    return acked.length;
  }

  /** Advance on first acknowledgment only: duplicates are deduplicated by
   * sentence id (the annotator is fixed by the session token). */
  private acknowledge(sentenceId: string): boolean {
    if (this.acked.has(sentenceId)) {
      return false;
    }
    this.acked.add(sentenceId);
    if (this.activeItem?.sentence_id === sentenceId) {
      this.cursor += 1;
      this.itemStartedAt = this.activeItem !== null ? this.now() : null;
    }
    return true;
  }
}
