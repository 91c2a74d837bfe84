// View state and the request-sequencing rule: a response may only be
// rendered if it belongs to the newest request issued for its panel.
// Out-of-order completions are discarded, never rendered.

import type {
  RecommendResponse,
  SearchResponse,
  SongSummary,
  StatsResponse,
} from "./api.js";

export interface Filters {
  genre?: string;
  emotion?: string;
  year_from?: number;
  year_to?: number;
}

export interface ViewState {
  queryText: string;
  filters: Filters;
  alpha: number;
  k: number;
  selectedSong: { id: string; song: SongSummary } | null;
  lambda: number;
  artistCap: number;
  results: SearchResponse | null;
  recommendations: RecommendResponse | null;
  statsCache: StatsResponse | null;
  searchSeq: number;
  renderedSearchSeq: number;
  recommendSeq: number;
  renderedRecommendSeq: number;
}

export function initialState(): ViewState {
  return {
    queryText: "",
    filters: {},
    alpha: 0.5,
    k: 10,
    selectedSong: null,
    lambda: 0.7,
    artistCap: 2,
    results: null,
    recommendations: null,
    statsCache: null,
    searchSeq: 0,
    renderedSearchSeq: 0,
    recommendSeq: 0,
    renderedRecommendSeq: 0,
  };
}

/** Issue a new search request token; newer tokens invalidate older ones. */
export function beginSearch(state: ViewState): number {
  state.searchSeq += 1;
  return state.searchSeq;
}

/**
 * Accept a completed search response only if no newer request exists and
 * nothing newer has already rendered. Returns whether it was applied.
 */
export function acceptSearch(
  state: ViewState,
  token: number,
  response: SearchResponse,
): boolean {
  if (token !== state.searchSeq || token <= state.renderedSearchSeq) {
    return false;
  }
  state.renderedSearchSeq = token;
  state.results = response;
  return true;
}

export function beginRecommend(state: ViewState): number {
  state.recommendSeq += 1;
  return state.recommendSeq;
}

export function acceptRecommend(
  state: ViewState,
  token: number,
  response: RecommendResponse,
): boolean {
  if (token !== state.recommendSeq || token <= state.renderedRecommendSeq) {
    return false;
  }
  state.renderedRecommendSeq = token;
  state.recommendations = response;
  return true;
}

/** 250 ms trailing debounce used by the search box. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 250,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
