import type { ComparisonPayload } from "../src/types.js";

export function comparisonFixture(overrides: Partial<ComparisonPayload> = {}): ComparisonPayload {
  return {
    baseline: {
      query: "java",
      results: [
        {
          rank: 1,
          title: "Getting started with Java",
          url: "http://coding.example/java-start",
          snippet: "java setup jdk install",
          engine_id: "local",
        },
        {
          rank: 2,
          title: "Java coffee beans",
          url: "http://coffee.example/java-beans",
          snippet: "",
          engine_id: "local",
        },
      ],
      total_estimate: 120,
    },
    reformulated: {
      query: "java programming",
      results: [
        {
          rank: 1,
          title: "Java programming patterns",
          url: "http://dev.example/java-patterns",
          snippet: "java programming design patterns",
          engine_id: "local",
        },
      ],
      total_estimate: 450,
    },
    reformulation: {
      original: "java",
      expanded: "java programming",
      added_terms: ["programming"],
      mode: "auto",
    },
    proposals: [
      { term: "programming", entry_id: "e-prog", status: "proposed" },
      { term: "island", entry_id: "e-island", status: "proposed" },
      { term: "coffee", entry_id: "e-coffee", status: "rejected" },
    ],
    ...overrides,
  };
}
