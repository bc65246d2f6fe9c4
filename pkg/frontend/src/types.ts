// Wire shapes of the detector service JSON API. Field names must match the
// server exactly; the UI never recomputes any of these numbers.

export interface WindowScore {
    begin_loc: number;
    end_loc: number;
    trg_len: number;
    nll: number;
}

export interface ThresholdKey {
    flavor: string;
    method: string;
    dimension: string;
    category: string | string[] | null;
}

export interface Verdict {
    origin: "human" | "ai";
    perplexity: number;
    threshold: number;
    threshold_key: ThresholdKey;
    margin: number;
    scorer: string;
    windows: WindowScore[];
}

export interface ThresholdEntry {
    flavor: string;
    method: string;
    dimension: string;
    category: string | null;
    threshold: number;
    objective: number;
}

export interface ThresholdTable {
    provenance: Record<string, unknown>;
    entries: ThresholdEntry[];
}

export interface AnalyzeRequest {
    text: string;
    flavor?: string;
    method?: string;
    dimension?: string;
    category?: string | string[];
}
