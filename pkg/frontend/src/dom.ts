// Programmatic page skeleton so production and tests build the exact same DOM.

export interface Elements {
    root: HTMLElement;
    draft: HTMLTextAreaElement;
    flavor: HTMLSelectElement;
    method: HTMLSelectElement;
    dimension: HTMLSelectElement;
    category: HTMLSelectElement;
    categoryWrap: HTMLElement;
    submit: HTMLButtonElement;
    reload: HTMLButtonElement;
    status: HTMLElement;
    result: HTMLElement;
    compareContext: HTMLInputElement;
    compareCandidates: HTMLInputElement;
    compareSubmit: HTMLButtonElement;
    compareResult: HTMLElement;
}

function labeled(doc: Document, text: string, control: HTMLElement): HTMLElement {
    const wrap = doc.createElement("label");
    wrap.className = "field";
    const caption = doc.createElement("span");
    caption.textContent = text;
    wrap.append(caption, control);
    return wrap;
}

export function buildSkeleton(root: HTMLElement): Elements {
    const doc = root.ownerDocument;
    root.innerHTML = "";

    const title = doc.createElement("h1");
    title.textContent = "Homework text origin check";
    root.appendChild(title);

    const compose = doc.createElement("section");
    compose.id = "compose";

    const draft = doc.createElement("textarea");
    draft.id = "draft";
    draft.rows = 8;
    draft.placeholder = "Paste the suspect answer here";
    compose.appendChild(draft);

    const selectors = doc.createElement("div");
    selectors.id = "selectors";
    const flavor = doc.createElement("select");
    flavor.id = "flavor";
    const method = doc.createElement("select");
    method.id = "method";
    const dimension = doc.createElement("select");
    dimension.id = "dimension";
    const category = doc.createElement("select");
    category.id = "category";
    category.multiple = true;
    category.size = 3;
    selectors.appendChild(labeled(doc, "flavor", flavor));
    selectors.appendChild(labeled(doc, "method", method));
    selectors.appendChild(labeled(doc, "dimension", dimension));
    const categoryWrap = labeled(doc, "category", category);
    categoryWrap.id = "category-wrap";
    selectors.appendChild(categoryWrap);
    compose.appendChild(selectors);

    const buttons = doc.createElement("div");
    buttons.className = "buttons";
    const submit = doc.createElement("button");
    submit.id = "submit";
    submit.textContent = "Analyze";
    const reload = doc.createElement("button");
    reload.id = "reload";
    reload.textContent = "Reload thresholds";
    buttons.append(submit, reload);
    compose.appendChild(buttons);

    const status = doc.createElement("div");
    status.id = "status";
    compose.appendChild(status);
    root.appendChild(compose);

    const result = doc.createElement("section");
    result.id = "result";
    root.appendChild(result);

    const compare = doc.createElement("section");
    compare.id = "compare";
    const compareTitle = doc.createElement("h2");
    compareTitle.textContent = "Candidate comparison";
    compare.appendChild(compareTitle);
    const hint = doc.createElement("p");
    hint.className = "hint";
    hint.textContent = "Perplexity of the context followed by each candidate next word, lowest first.";
    compare.appendChild(hint);
    const compareContext = doc.createElement("input");
    compareContext.id = "compare-context";
    compareContext.placeholder = "context, e.g. AI has the potential to be";
    const compareCandidates = doc.createElement("input");
    compareCandidates.id = "compare-candidates";
    compareCandidates.placeholder = "comma-separated candidates";
    const compareSubmit = doc.createElement("button");
    compareSubmit.id = "compare-submit";
    compareSubmit.textContent = "Compare";
    const compareResult = doc.createElement("div");
    compareResult.id = "compare-result";
    compare.append(
        labeled(doc, "context", compareContext),
        labeled(doc, "candidates", compareCandidates),
        compareSubmit,
        compareResult,
    );
    root.appendChild(compare);

    return {
        root,
        draft,
        flavor,
        method,
        dimension,
        category,
        categoryWrap,
        submit,
        reload,
        status,
        result,
        compareContext,
        compareCandidates,
        compareSubmit,
        compareResult,
    };
}
