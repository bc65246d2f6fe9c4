import { ApiError, getThresholds, postAnalyze, type FetchLike } from "./api.js";
import type { Elements } from "./dom.js";
import {
    canSubmit,
    deriveOptions,
    hasGlobalEntry,
    initialState,
    type UiState,
} from "./state.js";
import {
    renderBackendDown,
    renderCompare,
    renderRequestError,
    renderSelectors,
    renderStatus,
    renderTooShort,
    renderVerdict,
} from "./render.js";
import type { AnalyzeRequest, Verdict } from "./types.js";

export interface App {
    state: UiState;
    loadThresholds(): Promise<void>;
    submit(): Promise<void>;
    compare(): Promise<void>;
}

function readSelection(els: Elements, state: UiState): void {
    state.draft = els.draft.value;
    state.flavor = els.flavor.value || "orig";
    state.method = els.method.value || "auc";
    state.dimension = els.dimension.value || "global";
    state.category = Array.from(els.category.selectedOptions).map((option) => option.value);
}

function buildRequest(state: UiState): AnalyzeRequest {
    const request: AnalyzeRequest = {
        text: state.draft,
        flavor: state.flavor,
        method: state.method,
    };
    if (state.dimension !== "global" && state.category.length > 0) {
        request.dimension = state.dimension;
        request.category = state.category.length === 1 ? state.category[0] : state.category;
    }
    return request;
}

function isTooShort(detail: unknown): detail is { token_count: number; min_tokens: number } {
    return (
        typeof detail === "object" &&
        detail !== null &&
        (detail as { error?: string }).error === "text_too_short"
    );
}

export function initApp(els: Elements, baseUrl = "", fetchImpl?: FetchLike): App {
    const state = initialState();

    const refreshControls = () => {
        els.submit.disabled = !canSubmit(state);
    };

    const app: App = {
        state,

        async loadThresholds(): Promise<void> {
            try {
                state.table = await getThresholds(baseUrl, fetchImpl);
                renderSelectors(els, deriveOptions(state.table));
                const entries = state.table.entries.length;
                if (entries === 0) {
                    renderStatus(
                        els,
                        hasGlobalEntry(state.table)
                            ? "Threshold table loaded."
                            : "Threshold table is empty; analysis disabled until one is loaded.",
                        "warn",
                    );
                } else {
                    renderStatus(els, `Threshold table loaded (${entries} entries).`);
                }
            } catch {
                state.table = null;
                renderSelectors(els, deriveOptions(null));
                renderStatus(els, "Could not load thresholds; using service defaults (orig, auc, global).", "warn");
            }
            readSelection(els, state);
            refreshControls();
        },

        async submit(): Promise<void> {
            readSelection(els, state);
            if (!canSubmit(state)) return;
            const mySeq = ++state.seq;
            state.inFlight = true;
            refreshControls();
            renderStatus(els, "Analyzing...");
            try {
                const verdict: Verdict = await postAnalyze(baseUrl, buildRequest(state), fetchImpl);
                if (mySeq !== state.seq) return; // superseded; discard stale response
                state.lastVerdict = verdict;
                renderVerdict(els, verdict);
                renderStatus(els, "");
            } catch (error) {
                if (mySeq !== state.seq) return;
                if (error instanceof ApiError && error.status === 422 && isTooShort(error.detail)) {
                    renderTooShort(els, error.detail.token_count, error.detail.min_tokens);
                } else if (error instanceof ApiError && error.status === 503) {
                    renderBackendDown(els);
                } else if (error instanceof ApiError) {
                    renderRequestError(els, error.status, error.detail);
                } else {
                    renderBackendDown(els);
                }
                renderStatus(els, "");
            } finally {
                if (mySeq === state.seq) {
                    state.inFlight = false;
                    refreshControls();
                }
            }
        },

        async compare(): Promise<void> {
            const context = els.compareContext.value.trim();
            const candidates = els.compareCandidates.value
                .split(",")
                .map((c) => c.trim())
                .filter((c) => c.length > 0);
            if (context === "" || candidates.length === 0) {
                renderStatus(els, "Compare needs a context and at least one candidate.", "warn");
                return;
            }
            try {
                const ranked: Array<{ candidate: string; perplexity: number }> = [];
                for (const candidate of candidates) {
                    const verdict = await postAnalyze(baseUrl, { text: `${context} ${candidate}` }, fetchImpl);
                    ranked.push({ candidate, perplexity: verdict.perplexity });
                }
                ranked.sort((a, b) => a.perplexity - b.perplexity);
                renderCompare(els, ranked);
            } catch (error) {
                const status = error instanceof ApiError ? error.status : 0;
                renderStatus(els, `Comparison failed (status ${status}).`, "error");
            }
        },
    };

    els.submit.addEventListener("click", () => void app.submit());
    els.reload.addEventListener("click", () => void app.loadThresholds());
    els.compareSubmit.addEventListener("click", () => void app.compare());
    els.draft.addEventListener("input", () => {
        readSelection(els, state);
        refreshControls();
    });
    els.dimension.addEventListener("change", () => {
        renderSelectors(els, deriveOptions(state.table));
        readSelection(els, state);
        refreshControls();
    });

    readSelection(els, state);
    refreshControls();
    return app;
}
