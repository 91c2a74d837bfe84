// Bar charts rendered straight from API counts. The UI never
// re-aggregates: every bar's value is a count field from the payload,
// carried into the DOM as a data-count attribute so tests can compare
// rendered data against the API response field-for-field.

import { escapeHtml } from "./highlight.js";

export interface Bar {
  label: string;
  count: number;
}

export function barsFromRows<K extends string>(
  rows: ({ count: number } & Record<K, string>)[],
  labelKey: K,
): Bar[] {
  return rows.map((row) => ({ label: String(row[labelKey]), count: row.count }));
}

export function renderBarChart(title: string, bars: Bar[], caption = ""): string {
  if (bars.length === 0) {
    return `<section class="chart" data-chart="${escapeHtml(title)}">
      <h3>${escapeHtml(title)}</h3><p class="empty">no data</p></section>`;
  }
  const max = Math.max(...bars.map((b) => b.count));
  const rows = bars
    .map((bar) => {
      const width = max > 0 ? Math.max(1, Math.round((bar.count / max) * 100)) : 1;
      return `<div class="bar-row" data-label="${escapeHtml(bar.label)}" data-count="${bar.count}">
        <span class="bar-label">${escapeHtml(bar.label)}</span>
        <span class="bar" style="width:${width}%"></span>
        <span class="bar-count">${bar.count}</span>
      </div>`;
    })
    .join("\n");
  const captionHtml = caption ? `<p class="caption">${escapeHtml(caption)}</p>` : "";
  return `<section class="chart" data-chart="${escapeHtml(title)}">
    <h3>${escapeHtml(title)}</h3>
    ${rows}
    ${captionHtml}
  </section>`;
}

/** Extract the (label, count) pairs back out of rendered chart HTML. */
export function chartData(html: string): Bar[] {
  const out: Bar[] = [];
  const re = /data-label="([^"]*)" data-count="(\d+)"/g;
  for (const match of html.matchAll(re)) {
    out.push({ label: match[1] ?? "", count: Number(match[2]) });
  }
  return out;
}
