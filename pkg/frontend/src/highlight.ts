// Pure span-to-segment conversion for rendering matched terms inside a
// sentence. Overlapping spans merge; an unsuppressed match wins over a
// suppressed one on the shared stretch.

import type { MatchSpan } from "./types.js";

export type SegmentKind = "plain" | "match" | "suppressed";

export interface Segment {
  text: string;
  kind: SegmentKind;
}

export function segmentText(text: string, matches: MatchSpan[]): Segment[] {
  const boundaries = new Set<number>([0, text.length]);
  const clipped = matches
    .map((m) => ({
      start: Math.max(0, Math.min(m.span[0], text.length)),
      end: Math.max(0, Math.min(m.span[1], text.length)),
      suppressed: m.suppressed,
    }))
    .filter((m) => m.end > m.start);
  for (const m of clipped) {
    boundaries.add(m.start);
    boundaries.add(m.end);
  }
  const cuts = Array.from(boundaries).sort((a, b) => a - b);

  const segments: Segment[] = [];
  for (let i = 0; i + 1 < cuts.length; i++) {
    const [start, end] = [cuts[i], cuts[i + 1]];
    let kind: SegmentKind = "plain";
    for (const m of clipped) {
      if (m.start <= start && end <= m.end) {
        if (!m.suppressed) {
          kind = "match";
          break;
        }
        kind = "suppressed";
      }
    }
    const last = segments[segments.length - 1];
    if (last !== undefined && last.kind === kind) {
      last.text += text.slice(start, end);
    } else {
      segments.push({ text: text.slice(start, end), kind });
    }
  }
  return segments;
}
