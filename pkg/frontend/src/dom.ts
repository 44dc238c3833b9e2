// DOM rendering: thin, stateless functions over the pure modules.

import { segmentText } from "./highlight.js";
import type { QueueItem, StatsPayload } from "./types.js";

export function renderQueueItem(item: QueueItem, doc: Document = document): HTMLElement {
  const root = doc.createElement("article");
  root.className = "queue-item";
  root.dataset.sentenceId = item.sentence_id;

  const sentence = doc.createElement("p");
  sentence.className = "sentence";
  for (const segment of segmentText(item.text, item.matches)) {
    const span = doc.createElement("span");
    span.textContent = segment.text;
    if (segment.kind !== "plain") {
      span.className = segment.kind;
    }
    sentence.appendChild(span);
  }
  root.appendChild(sentence);

  if (item.kind === "triage" && item.score !== null) {
    const badge = doc.createElement("span");
    badge.className = "score-badge";
    badge.textContent = item.score.toFixed(3);
    root.appendChild(badge);
  }
  return root;
}

export function renderProgress(
  progress: { done: number; total: number },
  doc: Document = document,
): HTMLElement {
  const el = doc.createElement("div");
  el.className = "progress";
  el.textContent = `${progress.done} / ${progress.total}`;
  return el;
}

export function renderRetry(onRetry: () => void, doc: Document = document): HTMLElement {
  const el = doc.createElement("div");
  el.className = "error";
  const message = doc.createElement("span");
  message.textContent = "Kon de wachtrij niet laden.";
  const button = doc.createElement("button");
  button.textContent = "Opnieuw proberen";
  button.addEventListener("click", onRetry);
  el.append(message, button);
  return el;
}

export function renderStats(stats: StatsPayload, doc: Document = document): HTMLElement {
  const table = doc.createElement("table");
  table.className = "stats";
  const head = doc.createElement("tr");
  for (const title of ["groep", "frequentie", "gelabeld", "% HSD"]) {
    const th = doc.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  table.appendChild(head);
  for (const row of stats.rows) {
    const tr = doc.createElement("tr");
    const cells = [
      row.group,
      String(row.frequency),
      String(row.labeled),
      row.pct_hsd === null ? "-" : `${(100 * row.pct_hsd).toFixed(1)}%`,
    ];
    for (const value of cells) {
      const td = doc.createElement("td");
      td.textContent = value;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  return table;
}
