// Highlight rendering from server-provided offsets. The API's
// term_spans are absolute offsets into the raw lyrics; this module
// slices by them verbatim and never re-matches text on the client.

import type { MatchedLine } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

/**
 * Render one matched line as HTML with <mark> around each term span.
 * Spans are given in raw-lyrics coordinates; the line starts at
 * line_span[0], so each span is shifted into the line before slicing.
 */
export function renderMatchedLine(line: MatchedLine): string {
  const [lineStart] = line.line_span;
  const text = line.line_text;
  const parts: string[] = [];
  let at = 0;
  for (const [lo, hi] of line.term_spans) {
    const from = lo - lineStart;
    const to = hi - lineStart;
    if (from < at || to > text.length) continue; // defensive: bad span
    parts.push(escapeHtml(text.slice(at, from)));
    parts.push(`<mark>${escapeHtml(text.slice(from, to))}</mark>`);
    at = to;
  }
  parts.push(escapeHtml(text.slice(at)));
  return parts.join("");
}

/** Plain-text version with >>term<< markers (used in tests/tooling). */
export function renderMatchedLinePlain(line: MatchedLine): string {
  return renderMatchedLine(line)
    .replaceAll("<mark>", ">>")
    .replaceAll("</mark>", "<<");
}
