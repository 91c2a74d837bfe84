// Application shell: wires the DOM to the API client and the pure
// renderers. Only this module touches the document.

import { ApiClient, ApiError } from "./api.js";
import {
  acceptRecommend,
  acceptSearch,
  beginRecommend,
  beginSearch,
  debounce,
  initialState,
} from "./state.js";
import {
  renderDashboard,
  renderEmptyPrompt,
  renderErrorBanner,
  renderRecommendations,
  renderResults,
  renderSongDetail,
} from "./views.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(): void {
  const api = new ApiClient();
  const state = initialState();

  const searchBox = el<HTMLInputElement>("search-box");
  const resultsPane = el<HTMLDivElement>("results");
  const genreSelect = el<HTMLSelectElement>("filter-genre");
  const emotionSelect = el<HTMLSelectElement>("filter-emotion");
  const yearFrom = el<HTMLInputElement>("filter-year-from");
  const yearTo = el<HTMLInputElement>("filter-year-to");
  const alphaSlider = el<HTMLInputElement>("alpha");
  const alphaValue = el<HTMLSpanElement>("alpha-value");
  const detailPane = el<HTMLDivElement>("song-detail");
  const recPane = el<HTMLDivElement>("recommendations");
  const lambdaSlider = el<HTMLInputElement>("lambda");
  const lambdaValue = el<HTMLSpanElement>("lambda-value");
  const capInput = el<HTMLInputElement>("artist-cap");
  const dashboardPane = el<HTMLDivElement>("dashboard");

  async function runSearch(): Promise<void> {
    const text = state.queryText.trim();
    if (!text) {
      resultsPane.innerHTML = renderEmptyPrompt();
      return;
    }
    const token = beginSearch(state);
    try {
      const response = await api.search({
        q: text,
        k: state.k,
        alpha: state.alpha,
        genre: state.filters.genre,
        emotion: state.filters.emotion,
        year_from: state.filters.year_from,
        year_to: state.filters.year_to,
      });
      if (acceptSearch(state, token, response)) {
        resultsPane.innerHTML = renderResults(response);
      }
    } catch (err) {
      if (token !== state.searchSeq) return; // a newer request owns the pane
      const e = err as ApiError;
      resultsPane.innerHTML = renderErrorBanner(e.code ?? "internal", e.message);
    }
  }

  const debouncedSearch = debounce(runSearch, 250);

  searchBox.addEventListener("input", () => {
    state.queryText = searchBox.value;
    debouncedSearch();
  });

  for (const [select, key] of [
    [genreSelect, "genre"],
    [emotionSelect, "emotion"],
  ] as const) {
    select.addEventListener("change", () => {
      state.filters[key] = select.value || undefined;
      void runSearch();
    });
  }
  for (const [input, key] of [
    [yearFrom, "year_from"],
    [yearTo, "year_to"],
  ] as const) {
    input.addEventListener("change", () => {
      state.filters[key] = input.value ? Number(input.value) : undefined;
      void runSearch();
    });
  }
  alphaSlider.addEventListener("input", () => {
    state.alpha = Number(alphaSlider.value);
    alphaValue.textContent = state.alpha.toFixed(2);
    debouncedSearch();
  });

  async function runRecommend(): Promise<void> {
    if (!state.selectedSong) return;
    const token = beginRecommend(state);
    try {
      const response = await api.recommend({
        seed: state.selectedSong.id,
        k: 8,
        lambda: state.lambda,
        artist_cap: state.artistCap,
      });
      if (acceptRecommend(state, token, response)) {
        recPane.innerHTML = renderRecommendations(response);
      }
    } catch (err) {
      if (token !== state.recommendSeq) return;
      const e = err as ApiError;
      recPane.innerHTML = renderErrorBanner(e.code ?? "internal", e.message);
    }
  }

  resultsPane.addEventListener("click", async (event) => {
    const card = (event.target as HTMLElement).closest<HTMLElement>("[data-doc-id]");
    if (!card) return;
    const id = card.dataset.docId;
    if (!id) return;
    try {
      const song = await api.song(id);
      state.selectedSong = { id, song };
      detailPane.innerHTML = renderSongDetail(song);
      await runRecommend();
    } catch (err) {
      const e = err as ApiError;
      detailPane.innerHTML = renderErrorBanner(e.code ?? "internal", e.message);
    }
  });

  lambdaSlider.addEventListener("input", () => {
    state.lambda = Number(lambdaSlider.value);
    lambdaValue.textContent = state.lambda.toFixed(2);
    void runRecommend();
  });
  capInput.addEventListener("change", () => {
    state.artistCap = Math.max(1, Number(capInput.value) || 2);
    void runRecommend();
  });

  async function loadDashboard(): Promise<void> {
    try {
      const stats = state.statsCache ?? (await api.stats());
      state.statsCache = stats;
      dashboardPane.innerHTML = renderDashboard(stats);
    } catch (err) {
      const e = err as ApiError;
      dashboardPane.innerHTML = renderErrorBanner(e.code ?? "internal", e.message);
    }
  }

  resultsPane.innerHTML = renderEmptyPrompt();
  void loadDashboard();
}

if (typeof document !== "undefined" && document.getElementById("search-box")) {
  boot();
}
