import { ApiError, PresyApi } from "./api.js";
import { SuggestScheduler } from "./debounce.js";
import type {
  ComparisonPayload,
  EnginePayload,
  ProposalPayload,
  SuggestionPayload,
  ValidationDecision,
  ValidationResultItem,
} from "./types.js";

export interface SessionState {
  profileId: string;
  inputText: string;
  suggestions: SuggestionPayload[];
  engines: EnginePayload[];
  selectedEngine: string | null;
  lastComparison: ComparisonPayload | null;
  pendingProposals: ProposalPayload[];
  notice: string | null;
  itemErrors: Map<string, string>;
}

/**
 * UI-framework-free session logic: keystrokes in, state changes out.
 * The optional onChange callback lets the DOM layer re-render.
 */
export class SessionController {
  readonly state: SessionState;
  private readonly scheduler: SuggestScheduler;

  constructor(
    private readonly api: PresyApi,
    profileId: string,
    private readonly onChange: () => void = () => {},
    debounceMs?: number,
  ) {
    this.state = {
      profileId,
      inputText: "",
      suggestions: [],
      engines: [],
      selectedEngine: null,
      lastComparison: null,
      pendingProposals: [],
      notice: null,
      itemErrors: new Map(),
    };
    this.scheduler = new SuggestScheduler(
      (text) => this.api.suggest(profileId, text).then((r) => r.suggestions),
      (_text, suggestions) => {
        this.state.suggestions = suggestions;
        this.state.notice = null;
        this.onChange();
      },
      (_text, error) => {
        this.state.suggestions = [];
        this.state.notice = error instanceof ApiError ? error.message : "suggestion lookup failed";
        this.onChange();
      },
      debounceMs,
    );
  }

  async loadEngines(): Promise<void> {
    const { engines } = await this.api.getEngines();
    this.state.engines = engines;
    if (this.state.selectedEngine === null && engines.length > 0) {
      this.state.selectedEngine = engines[0].id;
    }
    this.onChange();
  }

  selectEngine(engineId: string): void {
    this.state.selectedEngine = engineId;
    this.onChange();
  }

  onKeystroke(text: string): void {
    this.state.inputText = text;
    if (text.trim() === "") {
      this.scheduler.cancel();
      this.state.suggestions = [];
      this.onChange();
      return;
    }
    this.scheduler.onInput(text);
  }

  async runSearch(mode: "off" | "auto" | "manual", terms?: string[]): Promise<void> {
    const engine = this.state.selectedEngine;
    if (!engine) {
      this.state.notice = "no engine selected";
      this.onChange();
      return;
    }
    this.scheduler.cancel();
    try {
      const comparison = await this.api.search(this.state.profileId, {
        query: this.state.inputText,
        engine,
        mode,
        terms,
      });
      this.state.lastComparison = comparison;
      this.state.pendingProposals = comparison.proposals.filter(
        (p) => p.status === "proposed" && p.entry_id !== null,
      );
      this.state.itemErrors = new Map();
      this.state.notice = null;
    } catch (error) {
      this.state.notice = error instanceof ApiError ? error.message : "search failed";
    }
    this.onChange();
  }

  /** Apply accept/reject decisions; successful items leave the panel. */
  async submitValidations(decisions: ValidationDecision[]): Promise<ValidationResultItem[]> {
    if (decisions.length === 0) {
      return [];
    }
    const { results } = await this.api.validate(this.state.profileId, decisions);
    const settled = new Set(
      results.filter((item) => item.status !== undefined).map((item) => item.entry_id),
    );
    this.state.pendingProposals = this.state.pendingProposals.filter(
      (p) => !settled.has(p.entry_id ?? ""),
    );
    this.state.itemErrors = new Map(
      results
        .filter((item) => item.code !== undefined)
        .map((item) => [item.entry_id, item.message ?? item.code ?? "error"]),
    );
    this.onChange();
    return results;
  }
}
