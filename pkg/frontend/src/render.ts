import type { Elements } from "./dom.js";
import type { Options } from "./state.js";
import type { Verdict, WindowScore } from "./types.js";

// All rendering is presentation only: origin, numbers and windows are shown
// exactly as the service returned them.

function fillSelect(select: HTMLSelectElement, values: string[], keep: string[]): void {
    const doc = select.ownerDocument;
    select.innerHTML = "";
    for (const value of values) {
        const option = doc.createElement("option");
        option.value = value;
        option.textContent = value;
        if (keep.includes(value)) option.selected = true;
        select.appendChild(option);
    }
    if (!select.multiple && select.selectedIndex < 0 && select.options.length > 0) {
        select.selectedIndex = 0;
    }
}

export function renderSelectors(els: Elements, options: Options): void {
    fillSelect(els.flavor, options.flavors, [els.flavor.value]);
    fillSelect(els.method, options.methods, [els.method.value]);
    fillSelect(els.dimension, options.dimensions, [els.dimension.value]);
    const dimension = els.dimension.value;
    const categories = options.categories[dimension] ?? [];
    const selected = Array.from(els.category.selectedOptions).map((o) => o.value);
    fillSelect(els.category, categories, selected);
    // categories only exist for taxonomy dimensions; hide the selector otherwise
    els.categoryWrap.style.display = dimension === "global" || categories.length === 0 ? "none" : "";
}

export function renderStatus(els: Elements, text: string, kind: "info" | "warn" | "error" = "info"): void {
    els.status.textContent = text;
    els.status.className = kind;
}

function describeKey(verdict: Verdict): string {
    const key = verdict.threshold_key;
    const category = key.category === null ? "" : ` / ${Array.isArray(key.category) ? key.category.join("+") : key.category}`;
    return `${key.flavor} / ${key.method} / ${key.dimension}${category}`;
}

function windowRow(doc: Document, window: WindowScore): HTMLTableRowElement {
    const row = doc.createElement("tr");
    const length = window.end_loc - window.begin_loc;
    const overlap = length - window.trg_len;
    for (const value of [window.begin_loc, window.end_loc, window.trg_len, window.nll.toFixed(4)]) {
        const cell = doc.createElement("td");
        cell.textContent = String(value);
        row.appendChild(cell);
    }
    const overlapCell = doc.createElement("td");
    overlapCell.className = "overlap-cell";
    const bar = doc.createElement("div");
    bar.className = "overlap-bar";
    bar.title = `${overlap} overlapping context token(s), ${window.trg_len} target token(s)`;
    const context = doc.createElement("span");
    context.className = "context-part";
    context.style.width = `${Math.round((overlap / length) * 100)}%`;
    const target = doc.createElement("span");
    target.className = "target-part";
    target.style.width = `${Math.round((window.trg_len / length) * 100)}%`;
    bar.append(context, target);
    overlapCell.appendChild(bar);
    row.appendChild(overlapCell);
    return row;
}

export function renderVerdict(els: Elements, verdict: Verdict): void {
    const doc = els.result.ownerDocument;
    els.result.innerHTML = "";

    const banner = doc.createElement("div");
    banner.className = `banner ${verdict.origin}`;
    banner.textContent = verdict.origin === "ai" ? "AI-generated" : "Human-written";
    els.result.appendChild(banner);

    const gauge = doc.createElement("div");
    gauge.className = "gauge";
    const scale = Math.max(verdict.perplexity, verdict.threshold) * 1.25 || 1;
    const fill = doc.createElement("div");
    fill.className = `gauge-fill ${verdict.origin}`;
    fill.style.width = `${Math.min(100, (verdict.perplexity / scale) * 100)}%`;
    const tick = doc.createElement("div");
    tick.className = "gauge-tick";
    tick.style.left = `${Math.min(100, (verdict.threshold / scale) * 100)}%`;
    tick.title = `threshold ${verdict.threshold}`;
    gauge.append(fill, tick);
    els.result.appendChild(gauge);

    const numbers = doc.createElement("p");
    numbers.className = "numbers";
    numbers.textContent =
        `perplexity ${verdict.perplexity.toFixed(4)} vs threshold ${verdict.threshold.toFixed(4)}` +
        ` (margin ${verdict.margin >= 0 ? "+" : ""}${verdict.margin.toFixed(4)})`;
    const keySpan = doc.createElement("span");
    keySpan.className = "threshold-key";
    keySpan.textContent = ` [${describeKey(verdict)}]`;
    keySpan.title = JSON.stringify(verdict.threshold_key);
    numbers.appendChild(keySpan);
    els.result.appendChild(numbers);

    const table = doc.createElement("table");
    table.className = "windows";
    const head = doc.createElement("tr");
    for (const column of ["begin_loc", "end_loc", "trg_len", "nll", "context | targets"]) {
        const th = doc.createElement("th");
        th.textContent = column;
        head.appendChild(th);
    }
    table.appendChild(head);
    for (const window of verdict.windows) {
        table.appendChild(windowRow(doc, window));
    }
    els.result.appendChild(table);

    const tokenCount = verdict.windows.reduce((sum, w) => sum + w.trg_len, 0);
    const footer = doc.createElement("p");
    footer.className = "footer";
    footer.textContent = `${tokenCount} tokens in ${verdict.windows.length} windows, scorer ${verdict.scorer}`;
    els.result.appendChild(footer);
}

export function renderTooShort(els: Elements, tokenCount: number, minTokens: number): void {
    els.result.innerHTML = "";
    const notice = doc(els).createElement("div");
    notice.className = "notice too-short";
    notice.textContent = `Text too short: ${tokenCount} token(s), need at least ${minTokens}.`;
    els.result.appendChild(notice);
}

export function renderBackendDown(els: Elements): void {
    els.result.innerHTML = "";
    const banner = doc(els).createElement("div");
    banner.className = "notice backend-down";
    banner.textContent = "Backend unavailable; your draft is untouched, try again shortly.";
    els.result.appendChild(banner);
}

export function renderRequestError(els: Elements, status: number, detail: unknown): void {
    els.result.innerHTML = "";
    const banner = doc(els).createElement("div");
    banner.className = "notice request-error";
    banner.textContent = `Request failed (${status}): ${typeof detail === "string" ? detail : JSON.stringify(detail)}`;
    els.result.appendChild(banner);
}

export function renderCompare(els: Elements, ranked: Array<{ candidate: string; perplexity: number }>): void {
    const docRef = doc(els);
    els.compareResult.innerHTML = "";
    const list = docRef.createElement("ol");
    list.className = "compare-list";
    for (const { candidate, perplexity } of ranked) {
        const item = docRef.createElement("li");
        item.textContent = `${candidate}: perplexity ${perplexity.toFixed(2)}`;
        list.appendChild(item);
    }
    els.compareResult.appendChild(list);
}

function doc(els: Elements): Document {
    return els.result.ownerDocument;
}
