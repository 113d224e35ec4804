// Wire types, mirroring the backend JSON payloads field for field.
// The UI never derives data these payloads don't carry.

export interface SuggestionPayload {
  value: string;
  source_entry_ids: string[];
  score: number;
  preview: string;
}

export interface SuggestResponse {
  query: string;
  suggestions: SuggestionPayload[];
}

export interface SearchResultPayload {
  rank: number;
  title: string;
  url: string;
  snippet: string;
  engine_id: string;
}

export interface SearchResponsePayload {
  query: string;
  results: SearchResultPayload[];
  total_estimate: number;
}

export interface ReformulationPayload {
  original: string;
  expanded: string;
  added_terms: string[];
  mode: "off" | "manual" | "auto";
}

export interface ProposalPayload {
  term: string;
  entry_id: string | null;
  status: string | null;
}

export interface ComparisonPayload {
  baseline: SearchResponsePayload;
  reformulated: SearchResponsePayload;
  reformulation: ReformulationPayload;
  proposals: ProposalPayload[];
}

export interface EnginePayload {
  id: string;
  kind: string;
}

export interface ProfilePayload {
  id: string;
  age: number;
  sex: string;
  language: string;
  domains: string[];
  specialty: string;
  profession: string;
  study_level: string;
  created_at: string;
  entries: EntryPayload[];
}

export interface EntryPayload {
  id: string;
  profile_id: string;
  kind: "static" | "dynamic";
  attribute: string;
  value: string;
  status: "proposed" | "validated" | "rejected";
  use_count: number;
  created_at: string;
  last_used_at: string;
}

export interface ValidationDecision {
  entry_id: string;
  decision: "validated" | "rejected";
}

export interface ValidationResultItem {
  entry_id: string;
  status?: string;
  code?: string;
  message?: string;
}
