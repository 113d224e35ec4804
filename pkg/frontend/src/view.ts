import type {
  ComparisonPayload,
  EnginePayload,
  ProposalPayload,
  SearchResultPayload,
  SuggestionPayload,
} from "./types.js";

// View building is pure: everything rendered is copied from payload fields.

export interface BannerView {
  baselineTotal: number;
  reformulatedTotal: number;
  difference: number;
  text: string;
}

export interface ComparisonView {
  baselineRows: SearchResultPayload[];
  reformulatedRows: SearchResultPayload[];
  banner: BannerView;
  originalQuery: string;
  expandedQuery: string;
  addedTerms: string[];
  mode: string;
  pendingProposals: ProposalPayload[];
  proposalsVisible: boolean;
}

export function buildComparisonView(payload: ComparisonPayload): ComparisonView {
  const difference = payload.reformulated.total_estimate - payload.baseline.total_estimate;
  const off = payload.reformulation.mode === "off";
  const banner: BannerView = {
    baselineTotal: payload.baseline.total_estimate,
    reformulatedTotal: payload.reformulated.total_estimate,
    difference,
    text: off
      ? "no reformulation applied"
      : `${payload.baseline.total_estimate} pages vs ${payload.reformulated.total_estimate} pages ` +
        `(${difference >= 0 ? "+" : ""}${difference})`,
  };
  const pending = payload.proposals.filter((p) => p.status === "proposed" && p.entry_id !== null);
  return {
    baselineRows: payload.baseline.results,
    reformulatedRows: payload.reformulated.results,
    banner,
    originalQuery: payload.reformulation.original,
    expandedQuery: payload.reformulation.expanded,
    addedTerms: payload.reformulation.added_terms,
    mode: payload.reformulation.mode,
    pendingProposals: pending,
    proposalsVisible: pending.length > 0,
  };
}

const escapeHtml = (text: string): string =>
  text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

function renderResultList(rows: SearchResultPayload[]): string {
  if (rows.length === 0) {
    return '<p class="empty">(no results)</p>';
  }
  const items = rows
    .map(
      (r) =>
        `<li><span class="rank">${r.rank}</span> ` +
        `<a href="${escapeHtml(r.url)}">${escapeHtml(r.title)}</a>` +
        (r.snippet ? `<p class="snippet">${escapeHtml(r.snippet)}</p>` : "") +
        `</li>`,
    )
    .join("");
  return `<ol class="results">${items}</ol>`;
}

/** Area A: results without reformulation. */
export function renderBaselineArea(view: ComparisonView): string {
  return `<section data-area="A"><h2>Without reformulation</h2>${renderResultList(view.baselineRows)}</section>`;
}

/** Area B: results with reformulation, expanded query shown with added terms highlighted. */
export function renderReformulatedArea(view: ComparisonView): string {
  const added = new Set(view.addedTerms);
  const queryHtml = view.expandedQuery
    .split(" ")
    .map((word) => (added.has(word) ? `<mark>${escapeHtml(word)}</mark>` : escapeHtml(word)))
    .join(" ");
  return (
    `<section data-area="B"><h2>With reformulation</h2>` +
    `<p class="expanded-query">${queryHtml}</p>` +
    renderResultList(view.reformulatedRows) +
    `</section>`
  );
}

/** Area C: engine selector, fed by GET /engines. */
export function renderEngineSelector(engines: EnginePayload[], selected: string | null): string {
  const options = engines
    .map(
      (e) =>
        `<option value="${escapeHtml(e.id)}"${e.id === selected ? " selected" : ""}>` +
        `${escapeHtml(e.id)} (${escapeHtml(e.kind)})</option>`,
    )
    .join("");
  return `<section data-area="C"><label>Engine <select id="engine">${options}</select></label></section>`;
}

/** Area D: page-count banner comparing both total estimates. */
export function renderBannerArea(view: ComparisonView): string {
  return `<section data-area="D"><p class="totals">${escapeHtml(view.banner.text)}</p></section>`;
}

/** Area E: harvested terms awaiting validation; hidden when nothing is pending. */
export function renderProposalsArea(view: ComparisonView): string {
  if (!view.proposalsVisible) {
    return `<section data-area="E" hidden></section>`;
  }
  const checkboxes = view.pendingProposals
    .map(
      (p) =>
        `<li><label><input type="checkbox" data-entry-id="${escapeHtml(p.entry_id ?? "")}"> ` +
        `${escapeHtml(p.term)}</label></li>`,
    )
    .join("");
  return (
    `<section data-area="E"><h2>Enrich your context</h2>` +
    `<ul class="proposals">${checkboxes}</ul>` +
    `<button id="accept-selected">Keep selected</button>` +
    `<button id="reject-selected">Discard selected</button>` +
    `</section>`
  );
}

export function renderSuggestionList(suggestions: SuggestionPayload[]): string {
  if (suggestions.length === 0) {
    return "";
  }
  const items = suggestions
    .map(
      (s) =>
        `<li data-value="${escapeHtml(s.value)}">${escapeHtml(s.value)}` +
        ` <span class="preview">${escapeHtml(s.preview)}</span></li>`,
    )
    .join("");
  return `<ul class="suggestions">${items}</ul>`;
}

export function renderComparison(view: ComparisonView): string {
  return [
    renderBannerArea(view),
    renderBaselineArea(view),
    renderReformulatedArea(view),
    renderProposalsArea(view),
  ].join("\n");
}
