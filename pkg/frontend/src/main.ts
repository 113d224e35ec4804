import { PresyApi } from "./api.js";
import { SessionController } from "./session.js";
import {
  buildComparisonView,
  renderComparison,
  renderEngineSelector,
  renderSuggestionList,
} from "./view.js";

// Entry point for the browser. All state handling lives in SessionController;
// this file only wires DOM events and re-renders from session state.

const API_BASE = (window as unknown as { PRESY_API?: string }).PRESY_API ?? "http://127.0.0.1:8750";

function requireElement<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing #${id} in index.html`);
  }
  return element as T;
}

function start(): void {
  const params = new URLSearchParams(window.location.search);
  const profileId = params.get("profile");
  const root = requireElement<HTMLDivElement>("app");
  if (!profileId) {
    root.innerHTML = "<p>Add ?profile=&lt;id&gt; to the URL (create one with the CLI).</p>";
    return;
  }

  const queryInput = requireElement<HTMLInputElement>("query");
  const suggestionsBox = requireElement<HTMLDivElement>("suggestions");
  const engineBox = requireElement<HTMLDivElement>("engine-box");
  const comparisonBox = requireElement<HTMLDivElement>("comparison");
  const noticeBox = requireElement<HTMLParagraphElement>("notice");

  const api = new PresyApi(API_BASE);
  const session = new SessionController(api, profileId, render);

  function render(): void {
    noticeBox.textContent = session.state.notice ?? "";
    suggestionsBox.innerHTML = renderSuggestionList(session.state.suggestions);
    engineBox.innerHTML = renderEngineSelector(
      session.state.engines,
      session.state.selectedEngine,
    );
    const comparison = session.state.lastComparison;
    if (comparison) {
      const view = buildComparisonView(comparison);
      view.pendingProposals = session.state.pendingProposals;
      view.proposalsVisible = session.state.pendingProposals.length > 0;
      comparisonBox.innerHTML = renderComparison(view);
    }
  }

  queryInput.addEventListener("input", () => session.onKeystroke(queryInput.value));
  suggestionsBox.addEventListener("click", (event) => {
    const item = (event.target as HTMLElement).closest("li[data-value]");
    if (item) {
      queryInput.value = `${queryInput.value} ${item.getAttribute("data-value")}`.trim();
      session.onKeystroke(queryInput.value);
    }
  });
  engineBox.addEventListener("change", (event) => {
    session.selectEngine((event.target as HTMLSelectElement).value);
  });
  requireElement<HTMLButtonElement>("search-auto").addEventListener("click", () =>
    session.runSearch("auto"),
  );
  requireElement<HTMLButtonElement>("search-off").addEventListener("click", () =>
    session.runSearch("off"),
  );
  comparisonBox.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button");
    if (!button) {
      return;
    }
    const decision =
      button.id === "accept-selected" ? "validated" : button.id === "reject-selected" ? "rejected" : null;
    if (!decision) {
      return;
    }
    const checked = comparisonBox.querySelectorAll<HTMLInputElement>(
      'input[data-entry-id]:checked',
    );
    const decisions = Array.from(checked).map((box) => ({
      entry_id: box.getAttribute("data-entry-id") ?? "",
      decision: decision as "validated" | "rejected",
    }));
    void session.submitValidations(decisions);
  });

  void session.loadEngines();
}

document.addEventListener("DOMContentLoaded", start);
