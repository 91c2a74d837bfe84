// Typed client for the lyricsearch JSON API. The UI talks to the
// backend exclusively through this module.

export interface MatchedLine {
  line_text: string;
  line_span: [number, number];
  term_spans: [number, number][];
}

export interface SongSummary {
  title: string;
  artist: string;
  year: number | null;
  genre: string;
  emotion: string;
}

export interface SearchHit {
  doc_id: string;
  lexical: number;
  semantic: number;
  fused: number;
  matched_fields: string[];
  snippets: MatchedLine[];
  song: SongSummary;
}

export interface SearchResponse {
  hits: SearchHit[];
  total_candidates: number;
  query: { raw: string; terms: string[]; k: number; alpha: number };
  timing_ms: number;
  warnings?: string[];
}

export interface Song extends SongSummary {
  id: string;
  lyrics: string;
  source?: string | null;
}

export interface RecommendItem {
  doc_id: string;
  score: number;
  song: SongSummary;
}

export interface RecommendResponse {
  seed?: string;
  facet?: Record<string, string>;
  items: RecommendItem[];
  artist_share: Record<string, number>;
  warnings?: string[];
}

export interface CountRow {
  count: number;
  [key: string]: string | number;
}

export interface StatsResponse {
  total: number;
  by_year: { year: string; count: number }[];
  by_genre: { genre: string; count: number }[];
  by_emotion: { emotion: string; count: number }[];
  top_terms: Record<string, unknown>;
  balance: Record<
    string,
    { entropy_ratio: number; max_share: number; categories: number }
  >;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

export interface SearchParams {
  q: string;
  k?: number;
  alpha?: number;
  genre?: string;
  emotion?: string;
  year_from?: number;
  year_to?: number;
}

export interface RecommendParams {
  seed: string;
  k?: number;
  lambda?: number;
  artist_cap?: number;
}

/** Base URL resolution: explicit argument, then the global set by the
 * host page, then same-origin. */
export function resolveBaseUrl(explicit?: string): string {
  if (explicit !== undefined) return explicit.replace(/\/$/, "");
  const fromGlobal = (globalThis as { LYRICSEARCH_API_BASE?: string })
    .LYRICSEARCH_API_BASE;
  if (fromGlobal) return fromGlobal.replace(/\/$/, "");
  return "";
}

async function request<T>(url: string): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url);
  } catch (err) {
    throw new ApiError(0, "connection", `cannot reach the search service (${err})`);
  }
  let body: unknown;
  try {
    body = await response.json();
  } catch {
    throw new ApiError(response.status, "internal", "malformed response body");
  }
  if (!response.ok) {
    const e = body as ApiErrorBody;
    throw new ApiError(
      response.status,
      e.error?.code ?? "internal",
      e.error?.message ?? response.statusText,
    );
  }
  return body as T;
}

function query(params: Record<string, string | number | undefined>): string {
  const search = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined && value !== "") search.set(key, String(value));
  }
  return search.toString();
}

export class ApiClient {
  readonly base: string;

  constructor(base?: string) {
    this.base = resolveBaseUrl(base);
  }

  search(params: SearchParams): Promise<SearchResponse> {
    return request(`${this.base}/api/search?${query({ ...params })}`);
  }

  song(id: string): Promise<Song> {
    return request(`${this.base}/api/songs/${id}`);
  }

  recommend(params: RecommendParams): Promise<RecommendResponse> {
    return request(`${this.base}/api/recommend?${query({ ...params })}`);
  }

  recommendByFacet(
    kind: "genre" | "emotion",
    value: string,
    k?: number,
  ): Promise<RecommendResponse> {
    return request(
      `${this.base}/api/recommend/facet?${query({ [kind]: value, k })}`,
    );
  }

  stats(): Promise<StatsResponse> {
    return request(`${this.base}/api/stats`);
  }

  health(): Promise<{ status: string; documents: number }> {
    return request(`${this.base}/api/health`);
  }
}
