import type {
  ComparisonPayload,
  EnginePayload,
  ProfilePayload,
  SuggestResponse,
  ValidationDecision,
  ValidationResultItem,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/** Thin typed client for the backend JSON API. */
export class PresyApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "error";
      let message = `HTTP ${response.status}`;
      try {
        const body = await response.json();
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getEngines(): Promise<{ engines: EnginePayload[] }> {
    return this.request("/engines");
  }

  getProfile(profileId: string): Promise<ProfilePayload> {
    return this.request(`/profiles/${encodeURIComponent(profileId)}`);
  }

  createProfile(body: Record<string, unknown>): Promise<ProfilePayload> {
    return this.post("/profiles", body);
  }

  suggest(profileId: string, q: string, limit = 10): Promise<SuggestResponse> {
    const params = new URLSearchParams({ q, limit: String(limit) });
    return this.request(`/profiles/${encodeURIComponent(profileId)}/suggest?${params}`);
  }

  search(
    profileId: string,
    body: { query: string; engine: string; mode: string; terms?: string[] },
  ): Promise<ComparisonPayload> {
    return this.post(`/profiles/${encodeURIComponent(profileId)}/search`, body);
  }

  validate(
    profileId: string,
    decisions: ValidationDecision[],
  ): Promise<{ results: ValidationResultItem[] }> {
    return this.post(`/profiles/${encodeURIComponent(profileId)}/context/validate`, decisions);
  }
}
