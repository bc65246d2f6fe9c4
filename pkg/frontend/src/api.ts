import type { AnalyzeRequest, ThresholdTable, Verdict } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
    constructor(public status: number, public detail: unknown) {
        super(`request failed with status ${status}`);
    }
}

function defaultFetch(): FetchLike {
    // bind so the browser's fetch keeps its expected receiver
    return (input, init) => fetch(input, init);
}

async function parseOrThrow<T>(response: Response): Promise<T> {
    let body: unknown = null;
    try {
        body = await response.json();
    } catch {
        body = null;
    }
    if (!response.ok) {
        const detail =
            body && typeof body === "object" && "detail" in body
                ? (body as { detail: unknown }).detail
                : body;
        throw new ApiError(response.status, detail);
    }
    return body as T;
}

export async function postAnalyze(
    baseUrl: string,
    request: AnalyzeRequest,
    fetchImpl: FetchLike = defaultFetch(),
): Promise<Verdict> {
    const response = await fetchImpl(`${baseUrl}/api/v1/analyze`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(request),
    });
    return parseOrThrow<Verdict>(response);
}

export async function getThresholds(
    baseUrl: string,
    fetchImpl: FetchLike = defaultFetch(),
): Promise<ThresholdTable> {
    const response = await fetchImpl(`${baseUrl}/api/v1/thresholds`);
    return parseOrThrow<ThresholdTable>(response);
}
