// Wire types for the vacscreen service. The workbench consumes this HTTP
// interface verbatim and never invents its own label values.

export const DECISIONS = ["yes", "no", "?"] as const;
export type Decision = (typeof DECISIONS)[number];

export function isDecision(value: string): value is Decision {
  return (DECISIONS as readonly string[]).includes(value);
}

export interface Envelope<T> {
  meta: { dataset_hash: string; catalog_version: string };
  data: T;
}

export interface MatchSpan {
  sentence_id: string;
  term_id: string;
  span: [number, number];
  suppressed: boolean;
}

export interface QueueItem {
  sentence_id: string;
  text: string;
  matches: MatchSpan[];
  score: number | null;
  kind: "annotate" | "triage";
  position: number;
  soft_timer_seconds: number;
}

export interface QueuePayload {
  kind: string;
  annotator: string;
  items: QueueItem[];
}

export interface LabelRecord {
  sentence_id: string;
  annotator_id: string;
  label: string;
  timestamp: string;
}

export interface StatsRow {
  group: string;
  frequency: number;
  labeled: number;
  yes: number;
  no: number;
  unknown: number;
  pct_hsd: number | null;
}

export interface StatsPayload {
  rows: StatsRow[];
  total: { frequency: number; pct_hsd: number | null };
}

export interface WorkbenchConfig {
  baseUrl: string;
  token: string;
}
