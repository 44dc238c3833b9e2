// Thin typed client over the documented endpoints. The fetch function is
// injectable so tests (and the offline queue) can stub the network.

import type {
  Decision,
  Envelope,
  LabelRecord,
  QueuePayload,
  StatsPayload,
  WorkbenchConfig,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export interface SubmitAck {
  status: string;
  record: LabelRecord;
}

export class ApiClient {
  constructor(
    private readonly config: WorkbenchConfig,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<Envelope<T>> {
    const response = await this.fetchFn(`${this.config.baseUrl}${path}`, {
      ...init,
      headers: {
        Authorization: `Bearer ${this.config.token}`,
        "Content-Type": "application/json",
        ...(init?.headers ?? {}),
      },
    });
    if (!response.ok) {
      throw new ApiError(response.status, `request failed: ${path}`);
    }
    return (await response.json()) as Envelope<T>;
  }

  getQueue(kind: "annotate" | "triage", limit = 20): Promise<Envelope<QueuePayload>> {
    return this.request<QueuePayload>(`/queue?kind=${kind}&limit=${limit}`);
  }

  submitLabel(
    sentenceId: string,
    label: Decision,
    clientTimestamp: string,
  ): Promise<Envelope<SubmitAck>> {
    return this.request<SubmitAck>("/labels", {
      method: "POST",
      body: JSON.stringify({
        sentence_id: sentenceId,
        label,
        client_timestamp: clientTimestamp,
      }),
    });
  }

  getLabels(sentenceId?: string): Promise<Envelope<{ records: LabelRecord[] }>> {
    const query = sentenceId ? `?sentence_id=${encodeURIComponent(sentenceId)}` : "";
    return this.request(`/labels${query}`);
  }

  getStats(): Promise<Envelope<StatsPayload>> {
    return this.request<StatsPayload>("/stats");
  }

  getReport(kind: string): Promise<Envelope<unknown>> {
    return this.request(`/reports/${encodeURIComponent(kind)}`);
  }
}
