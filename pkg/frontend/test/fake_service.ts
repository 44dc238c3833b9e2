// In-memory stand-in for the vacscreen service, speaking the documented
// wire format. The label store object can be shared between instances to
// model a service restart over the same data directory.

import type { FetchLike } from "../src/api.js";
import type { LabelRecord, QueueItem } from "../src/types.js";

export interface LabelStore {
  records: Map<string, LabelRecord>;
  history: LabelRecord[];
}

export function newStore(): LabelStore {
  return { records: new Map(), history: [] };
}

const META = { dataset_hash: "hash", catalog_version: "nl-gender-1.0" };

export class FakeService {
  offline = false;
  tokens: Record<string, string> = { "token-a": "ann" };

  constructor(
    readonly store: LabelStore = newStore(),
    public queueItems: QueueItem[] = [],
  ) {}

  fetch: FetchLike = async (url, init) => {
    if (this.offline) {
      throw new TypeError("network unreachable");
    }
    const headers = (init?.headers ?? {}) as Record<string, string>;
    const token = (headers["Authorization"] ?? "").replace("Bearer ", "");
    const annotator = this.tokens[token];
    if (annotator === undefined) {
      return { ok: false, status: 401, json: async () => ({ detail: "unknown token" }) };
    }
    const path = url.replace(/^https?:\/\/[^/]+/, "");

    if (path.startsWith("/queue")) {
      const kind = new URLSearchParams(path.split("?")[1] ?? "").get("kind") ?? "annotate";
      const items = this.queueItems.filter(
        (item) => !this.store.records.has(`${item.sentence_id}|${annotator}`),
      );
      return {
        ok: true,
        status: 200,
        json: async () => ({ meta: META, data: { kind, annotator, items } }),
      };
    }
    if (path === "/labels" && init?.method === "POST") {
      const body = JSON.parse(String(init.body)) as {
        sentence_id: string;
        label: string;
        client_timestamp: string;
      };
      if (!["yes", "no", "?"].includes(body.label)) {
        return { ok: false, status: 422, json: async () => ({ detail: "bad label" }) };
      }
      const record: LabelRecord = {
        sentence_id: body.sentence_id,
        annotator_id: annotator,
        label: body.label,
        timestamp: body.client_timestamp,
      };
      this.store.records.set(`${body.sentence_id}|${annotator}`, record);
      this.store.history.push(record);
      return {
        ok: true,
        status: 200,
        json: async () => ({ meta: META, data: { status: "ok", record } }),
      };
    }
    if (path.startsWith("/labels")) {
      const wanted = new URLSearchParams(path.split("?")[1] ?? "").get("sentence_id");
      const records = Array.from(this.store.records.values()).filter(
        (r) => wanted === null || r.sentence_id === wanted,
      );
      return {
        ok: true,
        status: 200,
        json: async () => ({ meta: META, data: { records } }),
      };
    }
    return { ok: false, status: 404, json: async () => ({ detail: "not found" }) };
  };
}

export function queueItem(
  id: string,
  overrides: Partial<QueueItem> = {},
): QueueItem {
  return {
    sentence_id: id,
    text: `zin ${id}`,
    matches: [],
    score: null,
    kind: "annotate",
    position: 0,
    soft_timer_seconds: 30,
    ...overrides,
  };
}
