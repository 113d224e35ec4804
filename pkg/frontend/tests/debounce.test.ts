import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { SuggestScheduler } from "../src/debounce.js";
import type { SuggestionPayload } from "../src/types.js";

function suggestion(value: string): SuggestionPayload {
  return { value, source_entry_ids: ["e1"], score: 1, preview: value };
}

interface Deferred {
  resolve: (s: SuggestionPayload[]) => void;
  reject: (e: unknown) => void;
}

describe("SuggestScheduler", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  function harness() {
    const requests: { text: string; deferred: Deferred }[] = [];
    const applied: { text: string; values: string[] }[] = [];
    const errors: string[] = [];
    const scheduler = new SuggestScheduler(
      (text) =>
        new Promise<SuggestionPayload[]>((resolve, reject) => {
          requests.push({ text, deferred: { resolve, reject } });
        }),
      (text, suggestions) => applied.push({ text, values: suggestions.map((s) => s.value) }),
      (text) => errors.push(text),
    );
    return { scheduler, requests, applied, errors };
  }

  it("a quick 4-keystroke burst produces exactly one request", async () => {
    const { scheduler, requests } = harness();
    for (const text of ["j", "ja", "jav", "java"]) {
      scheduler.onInput(text);
      vi.advanceTimersByTime(100); // below the 150 ms window
    }
    vi.advanceTimersByTime(150);
    expect(requests.map((r) => r.text)).toEqual(["java"]);
  });

  it("separate slow keystrokes each get their own request", async () => {
    const { scheduler, requests } = harness();
    scheduler.onInput("ja");
    vi.advanceTimersByTime(200);
    requests[0].deferred.resolve([]);
    await vi.runAllTimersAsync(); // let the completion settle
    scheduler.onInput("java");
    await vi.advanceTimersByTimeAsync(200);
    expect(requests.map((r) => r.text)).toEqual(["ja", "java"]);
  });

  it("keeps at most one request in flight and queues the newest text", async () => {
    const { scheduler, requests } = harness();
    scheduler.onInput("ja");
    vi.advanceTimersByTime(150); // request for "ja" now in flight
    scheduler.onInput("jav");
    vi.advanceTimersByTime(150);
    scheduler.onInput("java");
    vi.advanceTimersByTime(150);
    expect(requests).toHaveLength(1); // nothing new while in flight

    requests[0].deferred.resolve([suggestion("stale")]);
    await vi.runAllTimersAsync();
    expect(requests.map((r) => r.text)).toEqual(["ja", "java"]); // only the newest queued text fired
  });

  it("discards a response for an input that is no longer current", async () => {
    const { scheduler, requests, applied } = harness();
    scheduler.onInput("ja");
    vi.advanceTimersByTime(150);
    scheduler.onInput("java");
    vi.advanceTimersByTime(150);

    requests[0].deferred.resolve([suggestion("for-ja")]); // late response for "ja"
    await vi.runAllTimersAsync();
    requests[1].deferred.resolve([suggestion("for-java")]);
    await vi.runAllTimersAsync();

    expect(applied).toEqual([{ text: "java", values: ["for-java"] }]);
  });

  it("an old response never overwrites a newer applied one", async () => {
    const { scheduler, requests, applied } = harness();
    scheduler.onInput("ja");
    vi.advanceTimersByTime(150);
    scheduler.onInput("java");
    vi.advanceTimersByTime(150);
    requests[0].deferred.resolve([suggestion("for-ja")]);
    await vi.runAllTimersAsync();
    requests[1].deferred.resolve([suggestion("for-java")]);
    await vi.runAllTimersAsync();
    // replay the old payload once more; applied list must not change
    requests[0].deferred.resolve([suggestion("for-ja")]);
    await vi.runAllTimersAsync();
    expect(applied.at(-1)).toEqual({ text: "java", values: ["for-java"] });
    expect(applied).toHaveLength(1);
  });

  it("failures surface through the error callback without applying", async () => {
    const { scheduler, requests, applied, errors } = harness();
    scheduler.onInput("java");
    vi.advanceTimersByTime(150);
    requests[0].deferred.reject(new Error("404"));
    await vi.runAllTimersAsync();
    expect(applied).toHaveLength(0);
    expect(errors).toEqual(["java"]);
  });

  it("cancel drops the scheduled request", () => {
    const { scheduler, requests } = harness();
    scheduler.onInput("java");
    scheduler.cancel();
    vi.advanceTimersByTime(500);
    expect(requests).toHaveLength(0);
  });
});
