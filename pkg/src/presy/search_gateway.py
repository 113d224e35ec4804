"""Pluggable search providers and the dual (baseline vs reformulated) search.

Two provider kinds ship by default: a deterministic local tf-idf provider
over a JSON corpus file, and a generic HTTP provider driven by an endpoint
template plus a response field mapping. Search engines never get fabricated
results: transport failures raise.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence
from urllib.parse import quote_plus

import requests

from .context_store import ContextEntry, ContextStore, HistoryRecord, now_utc
from .errors import (
    DuplicateId,
    DuplicateUrl,
    MalformedProviderResponse,
    MissingConfig,
    ProviderUnavailable,
    UnknownProvider,
)
from .reformulation_engine import ReformulatedQuery, auto_reformulate, expand, identity_reformulation
from .text_pipeline import (
    DEFAULT_CANDIDATE_CAP,
    AntiDictionary,
    extract_candidates,
    load_anti_dictionary,
    segment,
)

DEFAULT_RESULT_LIMIT = 10
DEFAULT_HTTP_TIMEOUT = 10.0
SNIPPET_LENGTH = 160


@dataclass(frozen=True)
class SearchResult:
    rank: int
    title: str
    url: str
    snippet: str
    engine_id: str

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "title": self.title,
            "url": self.url,
            "snippet": self.snippet,
            "engine_id": self.engine_id,
        }


@dataclass(frozen=True)
class SearchResponse:
    query: str
    results: tuple[SearchResult, ...]
    total_estimate: int

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "results": [r.to_dict() for r in self.results],
            "total_estimate": self.total_estimate,
        }


@dataclass(frozen=True)
class CorpusDocument:
    url: str
    title: str
    body: str = ""


@dataclass(frozen=True)
class ComparisonResult:
    baseline: SearchResponse
    reformulated: SearchResponse
    reformulation: ReformulatedQuery
    proposals: tuple[str, ...]
    proposal_entries: tuple[ContextEntry, ...] = ()

    def to_dict(self) -> dict:
        by_term = {entry.value: entry for entry in self.proposal_entries}
        return {
            "baseline": self.baseline.to_dict(),
            "reformulated": self.reformulated.to_dict(),
            "reformulation": self.reformulation.to_dict(),
            "proposals": [
                {
                    "term": term,
                    "entry_id": by_term[term].id if term in by_term else None,
                    "status": by_term[term].status if term in by_term else None,
                }
                for term in self.proposals
            ],
        }


class SearchProvider(Protocol):
    engine_id: str

    def search(self, query: str, limit: int = DEFAULT_RESULT_LIMIT) -> SearchResponse: ...


class LocalIndex:
    """Inverted index over title+body tokens of a small document corpus."""

    def __init__(self, documents: Sequence[CorpusDocument]) -> None:
        urls = set()
        for doc in documents:
            if doc.url in urls:
                raise DuplicateUrl(f"duplicate corpus url {doc.url!r}")
            urls.add(doc.url)
        self.documents: tuple[CorpusDocument, ...] = tuple(documents)
        self.by_url = {doc.url: doc for doc in documents}
        self.term_frequencies: dict[str, dict[str, int]] = {}
        for doc in documents:
            for token in segment(doc.title) + segment(doc.body):
                postings = self.term_frequencies.setdefault(token.surface, {})
                postings[doc.url] = postings.get(doc.url, 0) + 1

    @property
    def size(self) -> int:
        return len(self.documents)

    def document_frequency(self, term: str) -> int:
        return len(self.term_frequencies.get(term, ()))


def index_corpus(documents: Sequence[CorpusDocument]) -> LocalIndex:
    return LocalIndex(documents)


def load_corpus(path: Path | str) -> list[CorpusDocument]:
    """Read a UTF-8 JSON array of {url, title, body} documents."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return [
        CorpusDocument(url=item["url"], title=item.get("title", ""), body=item.get("body", ""))
        for item in raw
    ]


class LocalProvider:
    """Deterministic tf-idf ranking over an in-memory corpus index.

    score(doc) = sum over non-stop-word query token occurrences of
    tf(token, doc) * ln(1 + N / df(token)); ties break by url so the ranked
    list is identical across runs and platforms.
    """

    kind = "local"

    def __init__(self, engine_id: str, index: LocalIndex, dictionary: AntiDictionary) -> None:
        self.engine_id = engine_id
        self.index = index
        self.dictionary = dictionary

    def search(self, query: str, limit: int = DEFAULT_RESULT_LIMIT) -> SearchResponse:
        scores: dict[str, float] = {}
        for token in segment(query):
            term = token.surface
            if term in self.dictionary.words:
                continue
            postings = self.index.term_frequencies.get(term)
            if not postings:
                continue
            idf = math.log(1 + self.index.size / len(postings))
            for url, count in postings.items():
                scores[url] = scores.get(url, 0.0) + count * idf
        matching = [(url, score) for url, score in scores.items() if score > 0]
        matching.sort(key=lambda pair: (-pair[1], pair[0]))
        results = tuple(
            SearchResult(
                rank=position,
                title=self.index.by_url[url].title,
                url=url,
                snippet=self.index.by_url[url].body[:SNIPPET_LENGTH],
                engine_id=self.engine_id,
            )
            for position, (url, _) in enumerate(matching[:limit], start=1)
        )
        return SearchResponse(query=query, results=results, total_estimate=len(matching))


def _dig(payload: object, path: str) -> object:
    current = payload
    for part in path.split("."):
        if not isinstance(current, dict) or part not in current:
            return None
        current = current[part]
    return current


class HttpProvider:
    """Generic JSON-over-HTTP engine adapter.

    The endpoint template must contain {query} (and may contain {limit});
    the mapping names where titles/urls/snippets and the engine's total
    page estimate live in the response document.
    """

    kind = "http"

    DEFAULT_MAPPING = {"results": "results", "title": "title", "url": "url", "snippet": "snippet"}

    def __init__(
        self,
        engine_id: str,
        endpoint: str,
        mapping: dict | None = None,
        timeout: float = DEFAULT_HTTP_TIMEOUT,
        session: requests.Session | None = None,
    ) -> None:
        self.engine_id = engine_id
        self.endpoint = endpoint
        self.mapping = {**self.DEFAULT_MAPPING, **(mapping or {})}
        self.timeout = timeout
        self.session = session or requests.Session()

    def search(self, query: str, limit: int = DEFAULT_RESULT_LIMIT) -> SearchResponse:
        url = self.endpoint.format(query=quote_plus(query), limit=limit)
        try:
            response = self.session.get(url, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"{self.engine_id}: {exc}") from exc
        if response.status_code >= 400:
            raise ProviderUnavailable(f"{self.engine_id}: HTTP {response.status_code}")
        try:
            payload = response.json()
        except ValueError as exc:
            raise MalformedProviderResponse(f"{self.engine_id}: not JSON") from exc

        items = _dig(payload, self.mapping["results"])
        if not isinstance(items, list):
            raise MalformedProviderResponse(
                f"{self.engine_id}: no result list at {self.mapping['results']!r}"
            )
        results = []
        for position, item in enumerate(items[:limit], start=1):
            if not isinstance(item, dict):
                raise MalformedProviderResponse(f"{self.engine_id}: result {position} not an object")
            result_url = _dig(item, self.mapping["url"])
            if not isinstance(result_url, str) or not result_url:
                raise MalformedProviderResponse(f"{self.engine_id}: result {position} has no url")
            title = _dig(item, self.mapping["title"])
            snippet = _dig(item, self.mapping["snippet"])
            results.append(
                SearchResult(
                    rank=position,
                    title=title if isinstance(title, str) else "",
                    url=result_url,
                    snippet=snippet if isinstance(snippet, str) else "",
                    engine_id=self.engine_id,
                )
            )
        total_path = self.mapping.get("total")
        if total_path is None:
            total = len(results)
        else:
            raw_total = _dig(payload, total_path)
            if not isinstance(raw_total, int) or isinstance(raw_total, bool) or raw_total < len(results):
                raise MalformedProviderResponse(f"{self.engine_id}: bad total estimate {raw_total!r}")
            total = raw_total
        return SearchResponse(query=query, results=tuple(results), total_estimate=total)


class ProviderRegistry:
    """Registered search engines, by unique id, in registration order."""

    def __init__(self, data_dir: Path | str | None = None) -> None:
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self._providers: dict[str, SearchProvider] = {}

    def register(self, engine_id: str, kind: str, config: dict | None = None) -> SearchProvider:
        if engine_id in self._providers:
            raise DuplicateId(f"provider {engine_id!r} already registered")
        config = config or {}
        if kind == "local":
            corpus_path = config.get("corpus")
            if not corpus_path:
                raise MissingConfig("local provider needs a 'corpus' path")
            language = config.get("language", "en")
            dictionary = load_anti_dictionary(language, self.data_dir)
            provider: SearchProvider = LocalProvider(
                engine_id, index_corpus(load_corpus(corpus_path)), dictionary
            )
        elif kind == "http":
            endpoint = config.get("endpoint")
            if not endpoint:
                raise MissingConfig("http provider needs an 'endpoint' template")
            provider = HttpProvider(
                engine_id,
                endpoint,
                mapping=config.get("mapping"),
                timeout=config.get("timeout", DEFAULT_HTTP_TIMEOUT),
            )
        else:
            raise MissingConfig(f"unknown provider kind {kind!r}")
        self._providers[engine_id] = provider
        return provider

    def register_instance(self, provider: SearchProvider) -> SearchProvider:
        if provider.engine_id in self._providers:
            raise DuplicateId(f"provider {provider.engine_id!r} already registered")
        self._providers[provider.engine_id] = provider
        return provider

    def get(self, engine_id: str) -> SearchProvider:
        provider = self._providers.get(engine_id)
        if provider is None:
            raise UnknownProvider(f"no provider {engine_id!r}")
        return provider

    def list(self) -> list[dict]:
        return [
            {"id": engine_id, "kind": getattr(provider, "kind", "custom")}
            for engine_id, provider in self._providers.items()
        ]


def dual_search(
    store: ContextStore,
    profile_id: str,
    query: str,
    provider: SearchProvider,
    mode: str = "off",
    terms: Sequence[str] | None = None,
    limit: int = DEFAULT_RESULT_LIMIT,
    proposal_cap: int = DEFAULT_CANDIDATE_CAP,
) -> ComparisonResult:
    """Run the with/without-reformulation comparison and harvest context.

    The baseline search always runs; the reformulated one is skipped (and the
    baseline response shared) whenever the reformulation is the identity.
    Titles of both responses feed the candidate harvest, the new proposals are
    attached to the last token of the original query, and one history record
    is appended.
    """
    profile = store.get_profile(profile_id)
    if mode not in ("off", "auto", "manual"):
        raise ValueError(f"unknown mode {mode!r}")

    baseline = provider.search(query, limit)

    if mode == "off":
        reformulation = identity_reformulation(query)
    elif mode == "auto":
        reformulation = auto_reformulate(store, profile_id, query)
    else:
        reformulation = expand(query, list(terms or ()))
    if reformulation.added_terms:
        reformulated = provider.search(reformulation.expanded, limit)
    else:
        reformulated = baseline

    titles = [r.title for r in baseline.results]
    if reformulated is not baseline:
        titles += [r.title for r in reformulated.results]
    dictionary = store.anti_dictionary(profile.language)
    proposals = extract_candidates(titles, dictionary, proposal_cap)

    query_tokens = segment(query)
    proposal_entries: tuple[ContextEntry, ...] = ()
    if query_tokens and proposals:
        attribute = query_tokens[-1].surface
        proposal_entries = tuple(store.propose_dynamic_entries(profile_id, attribute, proposals))

    store.append_history(
        HistoryRecord(
            profile_id=profile_id,
            timestamp=now_utc(),
            raw_query=query,
            reformulated_query=reformulation.expanded if reformulation.added_terms else None,
            engine_id=provider.engine_id,
            result_titles=tuple(r.title for r in baseline.results[:10]),
            result_urls=tuple(r.url for r in baseline.results[:10]),
            total_estimate_baseline=baseline.total_estimate,
            total_estimate_reformulated=reformulated.total_estimate,
        )
    )
    return ComparisonResult(
        baseline=baseline,
        reformulated=reformulated,
        reformulation=reformulation,
        proposals=tuple(proposals),
        proposal_entries=proposal_entries,
    )
