import type { SuggestionPayload } from "./types.js";

export const SUGGEST_DEBOUNCE_MS = 150;

/**
 * Schedules suggestion lookups for a stream of keystrokes.
 *
 * Rules: a request fires only after the input has been quiet for the
 * debounce window; at most one request is in flight (newer input queues and
 * fires on completion); a response is applied only if it is both newer than
 * anything applied so far and still matches the current input text, so a
 * late response for an old prefix can never overwrite fresher suggestions.
 */
export class SuggestScheduler {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private issued = 0;
  private applied = 0;
  private inflight = false;
  private pendingText: string | null = null;
  private latestText = "";

  constructor(
    private readonly requestFn: (text: string) => Promise<SuggestionPayload[]>,
    private readonly applyFn: (text: string, suggestions: SuggestionPayload[]) => void,
    private readonly errorFn: (text: string, error: unknown) => void = () => {},
    private readonly delayMs: number = SUGGEST_DEBOUNCE_MS,
  ) {}

  onInput(text: string): void {
    this.latestText = text;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire(text);
    }, this.delayMs);
  }

  /** Cancel whatever is scheduled (e.g. the input was cleared or submitted). */
  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pendingText = null;
  }

  private fire(text: string): void {
    if (this.inflight) {
      this.pendingText = text;
      return;
    }
    const id = ++this.issued;
    this.inflight = true;
    this.requestFn(text).then(
      (suggestions) => this.settle(id, text, () => this.applyFn(text, suggestions)),
      (error) => this.settle(id, text, () => this.errorFn(text, error)),
    );
  }

  private settle(id: number, text: string, deliver: () => void): void {
    this.inflight = false;
    if (id > this.applied && text === this.latestText) {
      this.applied = id;
      deliver();
    }
    if (this.pendingText !== null) {
      const next = this.pendingText;
      this.pendingText = null;
      this.fire(next);
    }
  }
}
