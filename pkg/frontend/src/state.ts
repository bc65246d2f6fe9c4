import type { ThresholdTable, Verdict } from "./types.js";

// Selector options are derived from the fetched threshold table and nothing
// else; when no table is available the UI falls back to the service default
// key (orig, auc, global) and says so.

export interface Options {
    flavors: string[];
    methods: string[];
    dimensions: string[];
    categories: Record<string, string[]>;
    fallback: boolean;
}

export interface UiState {
    draft: string;
    flavor: string;
    method: string;
    dimension: string;
    category: string[];
    table: ThresholdTable | null;
    lastVerdict: Verdict | null;
    inFlight: boolean;
    seq: number;
}

export function initialState(): UiState {
    return {
        draft: "",
        flavor: "orig",
        method: "auc",
        dimension: "global",
        category: [],
        table: null,
        lastVerdict: null,
        inFlight: false,
        seq: 0,
    };
}

function pushUnique(list: string[], value: string): void {
    if (!list.includes(value)) list.push(value);
}

export function deriveOptions(table: ThresholdTable | null): Options {
    if (table === null) {
        return {
            flavors: ["orig"],
            methods: ["auc"],
            dimensions: ["global"],
            categories: {},
            fallback: true,
        };
    }
    const options: Options = { flavors: [], methods: [], dimensions: [], categories: {}, fallback: false };
    for (const entry of table.entries) {
        pushUnique(options.flavors, entry.flavor);
        pushUnique(options.methods, entry.method);
        pushUnique(options.dimensions, entry.dimension);
        if (entry.dimension !== "global" && entry.category !== null) {
            const bucket = (options.categories[entry.dimension] ??= []);
            pushUnique(bucket, entry.category);
        }
    }
    return options;
}

export function hasGlobalEntry(table: ThresholdTable | null): boolean {
    return table !== null && table.entries.some((entry) => entry.dimension === "global");
}

export function canSubmit(state: UiState): boolean {
    if (state.inFlight || state.draft.trim() === "") return false;
    // without a table the service default may still work; with an empty table
    // a global-less request is guaranteed to 404, so disable
    if (state.table !== null && state.dimension === "global" && !hasGlobalEntry(state.table)) {
        return false;
    }
    return true;
}
