// HTML renderers for each panel. Pure string functions: the app shell
// assigns them to innerHTML, the tests assert on them directly.

import type {
  RecommendResponse,
  SearchHit,
  SearchResponse,
  Song,
  StatsResponse,
} from "./api.js";
import { barsFromRows, renderBarChart } from "./charts.js";
import { escapeHtml, renderMatchedLine } from "./highlight.js";

function badge(kind: string, value: string): string {
  return `<span class="badge badge-${kind}">${escapeHtml(value)}</span>`;
}

function yearText(year: number | null): string {
  return year === null ? "year unknown" : String(year);
}

export function renderHitCard(hit: SearchHit): string {
  const snippets = hit.snippets
    .map((line) => `<p class="snippet">${renderMatchedLine(line)}</p>`)
    .join("\n");
  const fields = hit.matched_fields
    .map((f) => `<span class="field-tag">${escapeHtml(f)}</span>`)
    .join(" ");
  return `<article class="hit" data-doc-id="${escapeHtml(hit.doc_id)}">
    <header>
      <h3 class="hit-title">${escapeHtml(hit.song.title)}</h3>
      <span class="hit-artist">${escapeHtml(hit.song.artist)}</span>
      <span class="hit-year">${yearText(hit.song.year)}</span>
      ${badge("genre", hit.song.genre)} ${badge("emotion", hit.song.emotion)}
    </header>
    <div class="matched-in">matched in: ${fields}</div>
    ${snippets}
    <footer class="scores">score ${hit.fused.toFixed(3)}
      (lexical ${hit.lexical.toFixed(2)}, semantic ${hit.semantic.toFixed(2)})</footer>
  </article>`;
}

export function renderResults(response: SearchResponse): string {
  if (response.hits.length === 0) {
    return `<p class="empty">No songs matched. ${response.total_candidates} candidates considered.</p>`;
  }
  const cards = response.hits.map(renderHitCard).join("\n");
  const warnings = (response.warnings ?? [])
    .map((w) => `<p class="warning">${escapeHtml(w)}</p>`)
    .join("");
  return `${warnings}
  <p class="result-meta">${response.hits.length} of ${response.total_candidates}
    candidate songs, ${response.timing_ms.toFixed(1)} ms</p>
  ${cards}`;
}

export function renderEmptyPrompt(): string {
  return `<p class="empty">Type a word or phrase to search song titles, artists, and lyrics.</p>`;
}

export function renderErrorBanner(code: string, message: string): string {
  const friendly: Record<string, string> = {
    empty_query: "Your query is empty or made only of stopwords.",
    not_found: "Nothing with that id exists.",
    bad_parameter: "One of the request parameters is invalid.",
    stale_index: "The service needs its index rebuilt.",
    connection: "Cannot reach the search service.",
    internal: "The service hit an internal error.",
  };
  const human = friendly[code] ?? "Something went wrong.";
  return `<div class="banner banner-error" data-code="${escapeHtml(code)}">
    <strong>${escapeHtml(human)}</strong>
    <span class="detail">${escapeHtml(message)}</span>
  </div>`;
}

export function renderSongDetail(song: Song): string {
  const lines = song.lyrics
    .split("\n")
    .map((line) => `<span class="lyric-line">${escapeHtml(line)}</span>`)
    .join("<br>");
  return `<article class="song-detail" data-doc-id="${escapeHtml(song.id)}">
    <h2>${escapeHtml(song.title)}</h2>
    <p>${escapeHtml(song.artist)} · ${yearText(song.year)}
      ${badge("genre", song.genre)} ${badge("emotion", song.emotion)}</p>
    <div class="lyrics">${lines}</div>
  </article>`;
}

export function renderRecommendations(response: RecommendResponse): string {
  if (response.items.length === 0) {
    return `<p class="empty">No similar songs found.</p>`;
  }
  const cards = response.items
    .map(
      (item, i) => `<div class="rec" data-doc-id="${escapeHtml(item.doc_id)}">
      <span class="rec-rank">${i + 1}</span>
      <span class="rec-title">${escapeHtml(item.song.title)}</span>
      <span class="rec-artist">${escapeHtml(item.song.artist)}</span>
      <span class="rec-score">${item.score.toFixed(3)}</span>
    </div>`,
    )
    .join("\n");
  const shareBars = Object.entries(response.artist_share).map(
    ([artist, share]) => ({
      label: artist,
      count: Math.round(share * 1000) / 10,
    }),
  );
  const share = renderBarChart(
    "Artist share (%)",
    shareBars,
    "Diversified with a hard per-artist cap; share shown for transparency.",
  );
  return `${cards}\n${share}`;
}

export function renderDashboard(stats: StatsResponse): string {
  if (stats.total === 0) {
    return `<p class="empty">The corpus is empty.</p>`;
  }
  const balanceCaption = (facet: string): string => {
    const metrics = stats.balance[facet];
    if (!metrics) return "";
    return `balance: entropy ratio ${metrics.entropy_ratio.toFixed(3)}, max share ${(metrics.max_share * 100).toFixed(1)}%`;
  };
  return [
    `<p class="total">${stats.total} songs</p>`,
    renderBarChart(
      "Songs by year",
      barsFromRows(stats.by_year, "year"),
      balanceCaption("year"),
    ),
    renderBarChart(
      "Songs by genre",
      barsFromRows(stats.by_genre, "genre"),
      balanceCaption("genre"),
    ),
    renderBarChart(
      "Songs by emotion",
      barsFromRows(stats.by_emotion, "emotion"),
      balanceCaption("emotion"),
    ),
  ].join("\n");
}
